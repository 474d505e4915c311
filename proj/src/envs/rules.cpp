#include "roto/envs/rules.hpp"

#include <cmath>

namespace roto::envs {

double r_dist(double d) { return 1.0 - std::tanh(d / 0.1); }

bool BounceCounter::update(bool contact) {
  if (!contact) {
    steps_without_contact_ += 1;
    return false;
  }
  const bool bounce = steps_without_contact_ >= kMinGap;
  steps_without_contact_ = 0;
  if (bounce) bounces_ += 1;
  return bounce;
}

bool RotationCounter::on_swap() {
  swaps_ += 1;
  return swaps_ % 2 == 0;
}

}  // namespace roto::envs
