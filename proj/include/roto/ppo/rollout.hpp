#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "roto/agent/agent.hpp"
#include "roto/envs/vec_env.hpp"
#include "roto/numerics/matrix.hpp"
#include "roto/numerics/rng.hpp"
#include "roto/numerics/running_stats.hpp"

namespace roto::ppo {

using numerics::Matrix;

// Raised when a batch collected under an older policy reaches an update.
class StaleBatchError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// R steps from B environments. Rows are time-major: row = t * B + env.
// Observation row t*B+i is the input the agent saw before acting at step t.
struct RolloutBatch {
  int num_envs = 0;
  int length = 0;
  Matrix obs;       // (R*B) x obs_dim
  Matrix actions;   // (R*B) x A, unclamped samples
  Matrix log_prob;  // (R*B) x 1
  Matrix rewards;   // (R*B) x 1, raw
  Matrix values;    // (R*B) x 1, in return units
  Matrix value_preds;  // (R*B) x 1, raw value-head output (normalized units)
  std::vector<uint8_t> terminated;
  std::vector<uint8_t> truncated;
  Matrix bootstrap_obs;     // B x obs_dim, observation after the last step
  Matrix bootstrap_values;  // B x 1, in return units
  int64_t policy_version = 0;

  int rows() const { return num_envs * length; }
  static int row(int t, int env, int num_envs) { return t * num_envs + env; }
  bool done(int r) const {
    return terminated[static_cast<size_t>(r)] != 0 || truncated[static_cast<size_t>(r)] != 0;
  }
  void validate() const;
};

// Running return statistics used to train v on normalized targets. Until two
// samples have been seen it behaves as the identity.
class ValueNormalizer {
 public:
  void update(const Matrix& returns);
  double normalize(double x) const { return ready() ? stats_.normalize(x) : x; }
  double denormalize(double y) const { return ready() ? stats_.denormalize(y) : y; }
  bool ready() const { return stats_.count() >= 2; }
  numerics::RunningStats& stats() { return stats_; }
  const numerics::RunningStats& stats() const { return stats_; }

 private:
  numerics::RunningStats stats_;
};

using StepCallback = std::function<void(const envs::BatchStep&)>;

// Runs the stochastic policy for `length` steps. Values are stored
// denormalized. The callback sees every batched step result.
RolloutBatch collect_rollout(envs::VecEnv& env, const agent::Agent& agent,
                             const ValueNormalizer& norm, int length, numerics::Rng& rng,
                             int64_t policy_version, const StepCallback& on_step = nullptr);

}  // namespace roto::ppo
