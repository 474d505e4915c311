#include "roto/numerics/running_stats.hpp"

#include <cmath>
#include <stdexcept>

namespace roto::numerics {

void RunningStats::update(double x) {
  count_ += 1;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningStats::update(std::span<const double> xs) {
  if (xs.empty()) return;
  // Two-pass batch moments, then Chan et al. parallel combine.
  const double nb = static_cast<double>(xs.size());
  double mean_b = 0.0;
  for (double x : xs) mean_b += x;
  mean_b /= nb;
  double m2_b = 0.0;
  for (double x : xs) m2_b += (x - mean_b) * (x - mean_b);
  const double na = static_cast<double>(count_);
  const double n = na + nb;
  const double delta = mean_b - mean_;
  mean_ += delta * nb / n;
  m2_ += m2_b + delta * delta * na * nb / n;
  count_ += static_cast<int64_t>(xs.size());
}

double RunningStats::normalize(double x) const {
  if (count_ < 2) throw std::logic_error("RunningStats::normalize needs at least 2 updates");
  return (x - mean_) / std::sqrt(variance() + kEps);
}

double RunningStats::denormalize(double y) const {
  if (count_ < 2) throw std::logic_error("RunningStats::denormalize needs at least 2 updates");
  return y * std::sqrt(variance() + kEps) + mean_;
}

void RunningStats::restore(int64_t count, double mean, double m2) {
  if (count < 0 || m2 < 0.0) throw std::invalid_argument("RunningStats::restore: bad state");
  count_ = count;
  mean_ = mean;
  m2_ = m2;
}

}  // namespace roto::numerics
