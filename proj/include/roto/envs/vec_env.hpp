#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "roto/envs/env.hpp"
#include "roto/envs/observation.hpp"
#include "roto/numerics/matrix.hpp"
#include "roto/numerics/rng.hpp"

namespace roto::envs {

std::unique_ptr<Simulator> make_simulator(const EnvConfig& cfg);

// Results of one batched control step. Frame data (prop, tact, ground truth)
// describe the state reached by the step, before any automatic reset.
struct BatchStep {
  numerics::Matrix prop;          // B x prop_dim
  numerics::Matrix tact;          // B x tact_dim
  numerics::Matrix reward;        // B x 1, = sum_i scale_i * terms_i
  numerics::Matrix terms;         // B x n_terms, unscaled
  numerics::Matrix ground_truth;  // B x gt_dim
  std::vector<uint8_t> terminated;
  std::vector<uint8_t> truncated;
  std::vector<StepEvents> events;
};

// Batched environment interface consumed by rollout collection.
class VecEnv {
 public:
  virtual ~VecEnv() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual int size() const = 0;
  // Current stacked observations, B x obs_dim.
  virtual const numerics::Matrix& observations() const = 0;
  // actions: B x action_dim, finite.
  virtual const BatchStep& step(const numerics::Matrix& actions) = 0;
};

// A batch of independent simulators with observation stacking and optional
// automatic reset.
class BatchEnv final : public VecEnv {
 public:
  explicit BatchEnv(EnvConfig cfg);

  const EnvConfig& config() const { return cfg_; }
  const EnvSpec& spec() const override { return spec_; }
  int size() const override { return cfg_.batch; }

  // Seeds env i with mix_seed(cfg.seed, i) and resets everything.
  void reset_all();
  // Re-seeds and resets the given environments.
  void reset(std::span<const int> indices, std::span<const uint64_t> seeds);

  const numerics::Matrix& observations() const override { return obs_; }
  // Latest frame data for each env (after reset this is the initial frame).
  const BatchStep& last() const { return last_; }

  // Values are clamped to [-1, 1] before reaching the simulators.
  const BatchStep& step(const numerics::Matrix& actions) override;

  void set_trace(bool on) { trace_on_ = on; }
  const std::vector<SubstepSnapshot>& trace(int env) const { return traces_[static_cast<size_t>(env)]; }

  int episode_step(int env) const { return episode_steps_[static_cast<size_t>(env)]; }
  int64_t total_steps() const { return total_steps_; }
  const Simulator& sim(int env) const { return *sims_[static_cast<size_t>(env)]; }

  nlohmann::ordered_json save_state() const;
  void load_state(const nlohmann::ordered_json& j);

 private:
  void reset_one(int i);
  void write_frame_row(int i, std::vector<double>& frame) const;
  void refresh_obs_row(int i);
  void capture_frame(int i);

  EnvConfig cfg_;
  EnvSpec spec_;
  std::vector<std::unique_ptr<Simulator>> sims_;
  std::vector<numerics::Rng> rngs_;
  std::vector<ObservationStack> stacks_;
  std::vector<int> episode_steps_;
  std::vector<std::vector<SubstepSnapshot>> traces_;
  numerics::Matrix obs_;
  BatchStep last_;
  int64_t total_steps_ = 0;
  bool trace_on_ = false;
};

}  // namespace roto::envs
