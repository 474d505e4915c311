#pragma once

#include <array>

#include "roto/envs/contact2d.hpp"
#include "roto/envs/env.hpp"

namespace roto::envs {

// Two discs in a circular dish, pushed by four position-controlled pegs
// towards alternating targets. Sensors: pegs 0-3 (any disc), disc-disc, disc-wall.
class Orbit2d final : public Simulator {
 public:
  static constexpr double kDishRadius = 0.12;
  static constexpr double kDiscRadius = 0.027;
  static constexpr double kPegRadius = 0.015;
  static constexpr double kDamping = 2.0;  // 1/s
  static constexpr double kRestitution = 0.5;
  static constexpr double kTargetRadius = 0.06;
  static constexpr double kSwapTolerance = 0.01;
  static constexpr double kFallDistance = 0.15;
  static constexpr double kPegHalfRange = 0.06;
  static constexpr std::array<double, 8> kPegHome = {0.06, 0.06, -0.06, 0.06,
                                                     -0.06, -0.06, 0.06, -0.06};
  static constexpr double kVelScale = 0.2;
  static constexpr double kSpawnClearance = 0.005;
  static constexpr double kMaxSubstepDisplacement = 0.5 * kPegRadius;
  static constexpr int kSensors = 6;
  static constexpr int kDiscDiscSensor = 4;
  static constexpr int kWallSensor = 5;

  enum : int {
    kPegs = 0,
    kPegVel = 8,
    kDiscs = 16,
    kDiscVel = 20,
    kAction = 24,
    kContact = 32,
    kAssignment = 38,  // 0: disc 0 -> target 0; 1: swapped
    kSwaps = 39,
    kSwapFlag = 40,
    kFell = 41,
    kRotationFlag = 42,
    kStateSize = 43
  };

  static Vec2 target(int index);  // index 0 at (+0.06, 0), 1 at (-0.06, 0)
  static double peg_lower(int coord) { return kPegHome[static_cast<size_t>(coord)] - kPegHalfRange; }
  static double peg_upper(int coord) { return kPegHome[static_cast<size_t>(coord)] + kPegHalfRange; }

  explicit Orbit2d(const EnvConfig& cfg);

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

  Vec2 disc(int i) const { return {s_[kDiscs + 2 * i], s_[kDiscs + 2 * i + 1]}; }
  Vec2 disc_vel(int i) const { return {s_[kDiscVel + 2 * i], s_[kDiscVel + 2 * i + 1]}; }
  Vec2 peg(int j) const { return {s_[kPegs + 2 * j], s_[kPegs + 2 * j + 1]}; }
  // Target currently assigned to disc i.
  Vec2 assigned_target(int i) const;

 private:
  void substep(const std::array<double, 8>& target, std::vector<SubstepSnapshot>* trace,
               std::array<bool, kSensors>& fired);
  bool pegs_clear_of_discs(double margin) const;

  EnvConfig cfg_;
  std::array<double, kStateSize> s_{};
};

}  // namespace roto::envs
