#pragma once

#include <cstddef>
#include <functional>

namespace roto::numerics {

// Worker count from ROTO_THREADS (default 1). 1 means serial execution.
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n). Iterations must touch disjoint data.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace roto::numerics
