#pragma once

#include <cstdint>
#include <span>

namespace roto::numerics {

// Streaming mean/variance of one scalar stream (population variance).
class RunningStats {
 public:
  static constexpr double kEps = 1e-8;

  void update(double x);
  void update(std::span<const double> xs);

  int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 0 ? m2_ / static_cast<double>(count_) : 0.0; }
  double m2() const { return m2_; }

  // (x - mean) / sqrt(var + eps). Requires count >= 2.
  double normalize(double x) const;
  double denormalize(double y) const;

  void restore(int64_t count, double mean, double m2);
  bool operator==(const RunningStats&) const = default;

 private:
  int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace roto::numerics
