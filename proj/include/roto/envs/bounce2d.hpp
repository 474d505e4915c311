#pragma once

#include <array>

#include "roto/envs/contact2d.hpp"
#include "roto/envs/env.hpp"
#include "roto/envs/rules.hpp"

namespace roto::envs {

// Kinematic paddle (x, z, tilt) keeping a ball airborne under gravity.
// Sensors: five equal paddle segments.
class Bounce2d final : public Simulator {
 public:
  static constexpr std::array<double, 3> kLower = {-0.2, 0.0, -0.5};
  static constexpr std::array<double, 3> kUpper = {0.2, 0.3, 0.5};
  static constexpr double kPaddleLength = 0.35;
  static constexpr double kBallRadius = 0.035;
  static constexpr double kRestitution = 0.8;
  static constexpr double kGravity = 9.81;
  static constexpr double kBallX = 0.0, kBallZ = 0.30;
  static constexpr double kFallX = 0.24;
  static constexpr int kSegments = 5;
  static constexpr double kVelScale = 0.2;
  static constexpr double kMaxSubstepDisplacement = 0.5 * kBallRadius;

  enum : int {
    kPaddle = 0,
    kPaddleVel = 3,
    kBall = 6,
    kBallVel = 8,
    kAction = 10,
    kContact = 13,
    kSide = 18,
    kNoContactSteps = 19,
    kBounces = 20,
    kBounceFlag = 21,
    kFell = 22,
    kStateSize = 23
  };

  struct Paddle {
    Vec2 center, a, b, normal;  // normal is the +z side
  };
  static Paddle paddle_geometry(double x, double z, double tilt);

  explicit Bounce2d(const EnvConfig& cfg);

  void reset(numerics::Rng& rng) override;
  void step(std::span<const double> action, std::vector<SubstepSnapshot>* trace) override;
  void write_prop(std::span<double> out) const override;
  void write_tact(std::span<double> out) const override;
  void write_terms(std::span<double> out) const override;
  void write_ground_truth(std::span<double> out) const override;
  bool terminated() const override { return s_[kFell] != 0.0; }
  StepEvents events() const override;
  std::vector<double> state() const override { return {s_.begin(), s_.end()}; }
  void set_state(std::span<const double> s) override;

 private:
  void substep(const std::array<double, 3>& target, std::vector<SubstepSnapshot>* trace,
               std::array<bool, kSegments>& fired);

  EnvConfig cfg_;
  std::array<double, kStateSize> s_{};
};

}  // namespace roto::envs
