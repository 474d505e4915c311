#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "roto/numerics/rng.hpp"

namespace roto::envs {

enum class EnvId { kFind2d, kBounce2d, kOrbit2d };

EnvId env_id_from_string(const std::string& name);
std::string to_string(EnvId id);

struct RewardScales {
  double dist = 1.0;         // find2d
  double air = 0.01;         // bounce2d
  double bounce = 10.0;      // bounce2d
  double fall = 10.0;        // bounce2d, orbit2d
  double target_dist = 0.1;  // orbit2d, per disc
  double rotation = 10.0;    // orbit2d, per target swap
};

struct EnvConfig {
  EnvId env_id = EnvId::kFind2d;
  int batch = 64;
  int history = 16;
  int episode_length = 300;
  double physics_dt = 1.0 / 120.0;
  int control_substeps = 2;
  RewardScales scales;
  // Initial-state randomization.
  double home_jitter_deg = 7.0;      // find2d joints
  double home_jitter_fraction = 0.2;  // bounce2d / orbit2d, fraction of joint range
  double object_jitter = 0.01;       // bounce2d ball (m); orbit2d uses 0.005
  bool use_tactile = true;           // include contacts in the observation
  bool object_present = true;
  bool pegs_active = true;  // orbit2d
  bool auto_reset = true;
  uint64_t seed = 0;

  // Defaults for each environment (history, episode length, jitter).
  static EnvConfig defaults(EnvId id);
  void validate() const;
};

struct EnvSpec {
  EnvId id = EnvId::kFind2d;
  int action_dim = 0;
  int prop_dim = 0;    // per frame
  int tact_dim = 0;    // number of binary sensors
  int frame_dim = 0;   // prop_dim + (use_tactile ? tact_dim : 0)
  int history = 1;
  int obs_dim = 0;     // history * frame_dim
  int gt_dim = 0;
  int episode_length = 0;
  std::vector<std::string> reward_terms;
  std::vector<double> reward_scales;
  bool use_tactile = true;
};

EnvSpec make_spec(const EnvConfig& cfg);

struct StepEvents {
  bool contact = false;   // any sensor fired this control step
  bool bounce = false;    // bounce2d
  bool swap = false;      // orbit2d target swap
  bool rotation = false;  // orbit2d, every second swap
  double distance = std::numeric_limits<double>::quiet_NaN();  // task distance metric
};

// Pre-resolution snapshot of one physics substep: the raw state vector plus the
// sensors whose contacts were detected on it.
struct SubstepSnapshot {
  std::vector<double> state;
  std::vector<int> detected_sensors;
};

// One environment instance. Reward terms are unscaled.
class Simulator {
 public:
  virtual ~Simulator() = default;

  virtual void reset(numerics::Rng& rng) = 0;
  // One control step with an action already clamped to [-1, 1].
  virtual void step(std::span<const double> action, std::vector<SubstepSnapshot>* trace) = 0;

  virtual void write_prop(std::span<double> out) const = 0;
  virtual void write_tact(std::span<double> out) const = 0;
  virtual void write_terms(std::span<double> out) const = 0;
  virtual void write_ground_truth(std::span<double> out) const = 0;
  virtual bool terminated() const = 0;
  virtual StepEvents events() const = 0;

  virtual std::vector<double> state() const = 0;
  virtual void set_state(std::span<const double> s) = 0;
};

// Servo law shared by all robots: velocity command toward the target, clamped.
inline double servo_velocity(double target, double q, double kp, double v_max) {
  const double v = kp * (target - q);
  return v > v_max ? v_max : (v < -v_max ? -v_max : v);
}

inline double action_to_target(double a, double lo, double hi) {
  return lo + 0.5 * (a + 1.0) * (hi - lo);
}

inline double normalize_joint(double q, double lo, double hi) {
  return 2.0 * (q - lo) / (hi - lo) - 1.0;
}

inline constexpr double kServoGain = 20.0;
inline constexpr double kServoMaxVel = 2.0;

}  // namespace roto::envs
