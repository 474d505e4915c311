#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace roto::numerics {

// splitmix64 finalizer, used to derive independent stream seeds.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// Deterministic random source. Distributions are implemented here rather than
// through <random> so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller. No cached second value, so state is just the engine.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n).
  uint64_t index(uint64_t n);

  std::string serialize() const;
  void deserialize(const std::string& state);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace roto::numerics
