#pragma once

#include <cstdint>

namespace roto::envs {

// Distance shaping term: 1 - tanh(d / 0.1).
double r_dist(double d);

// Bounce rule: a contact counts as a bounce when at least kMinGap contact-free
// control steps preceded it.
class BounceCounter {
 public:
  static constexpr int kMinGap = 5;

  // Feed one control step. Returns true if this step is a bounce.
  bool update(bool contact);
  void reset() { *this = BounceCounter(); }

  int steps_without_contact() const { return steps_without_contact_; }
  int64_t bounces() const { return bounces_; }
  void restore(int steps_without_contact, int64_t bounces) {
    steps_without_contact_ = steps_without_contact;
    bounces_ = bounces;
  }

 private:
  int steps_without_contact_ = 0;
  int64_t bounces_ = 0;
};

// A rotation is two consecutive target swaps.
class RotationCounter {
 public:
  // Register one swap. Returns true if it completes a rotation.
  bool on_swap();
  void reset() { *this = RotationCounter(); }

  int64_t swaps() const { return swaps_; }
  int64_t rotations() const { return swaps_ / 2; }
  void restore(int64_t swaps) { swaps_ = swaps; }

 private:
  int64_t swaps_ = 0;
};

}  // namespace roto::envs
