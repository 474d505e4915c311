#include "roto/numerics/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace roto::numerics {

namespace {

int read_env_threads() {
  const char* s = std::getenv("ROTO_THREADS");
  if (!s) return 1;
  try {
    return std::max(1, std::stoi(s));
  } catch (...) {
    return 1;
  }
}

std::atomic<int> g_workers{read_env_threads()};

}  // namespace

int worker_count() { return g_workers.load(); }
void set_worker_count(int n) { g_workers.store(std::max(1, n)); }

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min(static_cast<size_t>(worker_count()), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Static contiguous chunks; each index is handled by exactly one thread.
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t lo = w * chunk;
    const size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&fn, &errors, w, lo, hi] {
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace roto::numerics
