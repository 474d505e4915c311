#pragma once

#include <array>

#include "roto/envs/contact2d.hpp"
#include "roto/envs/env.hpp"

namespace roto::envs {

// Planar 2-link arm with a parallel-jaw fork at the wrist, searching for a
// fixed disc. Sensors: left and right halves of the fork (finger + half palm).
class Find2d final : public Simulator {
 public:
  static constexpr double kLink1 = 0.3;
  static constexpr double kLink2 = 0.25;
  static constexpr double kLinkRadius = 0.01;
  static constexpr double kFingerOffset = 0.04;  // lateral, from the wrist axis
  static constexpr double kFingerLength = 0.07;
  static constexpr double kFingerRadius = 0.005;
  static constexpr double kCenterOffset = 0.045;  // end-effector centre ahead of the wrist
  static constexpr double kDiscRadius = 0.03;
  static constexpr std::array<double, 2> kLower = {-1.5, -2.7};
  static constexpr std::array<double, 2> kUpper = {1.5, 2.7};
  static constexpr std::array<double, 2> kHome = {1.2, -2.4};
  static constexpr double kBoxXLo = 0.32, kBoxXHi = 0.52, kBoxYLo = -0.1, kBoxYHi = 0.1;
  static constexpr double kVelScale = 0.33;
  static constexpr double kSpawnClearance = 0.01;
  // Largest distance from joint 1 / joint 2 to any arm point, for the displacement cap.
  static constexpr double kReach1 = kLink1 + kLink2 + kFingerLength + kFingerOffset + 0.01;
  static constexpr double kReach2 = kLink2 + kFingerLength + kFingerOffset + 0.01;
  static constexpr double kMaxSubstepDisplacement = 0.5 * kDiscRadius;

  // State vector layout.
  enum : int { kTheta = 0, kThetaDot = 2, kDisc = 4, kAction = 6, kContact = 8, kStateSize = 10 };

  struct Capsule {
    Vec2 a, b;
    double radius;
    int sensor;  // -1 for non-sensing parts
  };
  // Arm geometry for joint angles q: link1, link2, left palm, right palm,
  // left finger, right finger.
  static std::array<Capsule, 6> arm_capsules(double q1, double q2);
  static Vec2 end_effector(double q1, double q2);

  explicit Find2d(const EnvConfig& cfg);

  void reset(numerics::Rng& rng) override;
  void step(std::span<const double> action, std::vector<SubstepSnapshot>* trace) override;
  void write_prop(std::span<double> out) const override;
  void write_tact(std::span<double> out) const override;
  void write_terms(std::span<double> out) const override;
  void write_ground_truth(std::span<double> out) const override;
  bool terminated() const override { return false; }
  StepEvents events() const override;
  std::vector<double> state() const override { return {s_.begin(), s_.end()}; }
  void set_state(std::span<const double> s) override;

  double distance() const;
  bool arm_overlaps_disc(double margin) const;

 private:
  void substep(const std::array<double, 2>& target, std::vector<SubstepSnapshot>* trace,
               std::array<bool, 2>& fired);

  EnvConfig cfg_;
  std::array<double, kStateSize> s_{};
};

}  // namespace roto::envs
