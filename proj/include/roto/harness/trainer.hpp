#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roto/agent/agent.hpp"
#include "roto/auxmem/aux_memory.hpp"
#include "roto/envs/vec_env.hpp"
#include "roto/harness/config.hpp"
#include "roto/harness/evaluation.hpp"
#include "roto/harness/metrics_log.hpp"
#include "roto/ppo/ppo.hpp"
#include "roto/ssl/aux_update.hpp"

namespace roto::harness {

// Raised after a non-finite loss once the abort checkpoint is written.
class TrainingAborted : public numerics::NumericError {
 public:
  TrainingAborted(const std::string& what, std::string checkpoint)
      : numerics::NumericError(what), checkpoint_(std::move(checkpoint)) {}
  const std::string& checkpoint() const { return checkpoint_; }

 private:
  std::string checkpoint_;
};

// Owns one training run: environments, agent, learners and the auxiliary
// memory. Each iteration collects a rollout, runs the PPO update, then the
// auxiliary update when an objective is configured.
class Trainer {
 public:
  explicit Trainer(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const agent::Agent& agent() const { return agent_; }
  agent::Agent& agent() { return agent_; }
  const envs::BatchEnv& env() const { return env_; }
  const auxmem::AuxMemory& memory() const { return memory_; }
  int64_t global_step() const { return global_step_; }
  int64_t updates() const { return updates_; }
  double wall_time() const { return wall_time_; }
  bool finished() const { return global_step_ >= cfg_.total_steps; }
  const std::vector<std::string>& columns() const { return columns_; }

  // One collect/update iteration (plus evaluation when due); returns its row.
  MetricsRow iterate();
  EvalReport evaluate_now() const;

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  // Trains to the step budget inside cfg.out_dir, writing config.toml,
  // manifest.json, metrics.csv and checkpoints/. Resumes from
  // checkpoints/latest when it exists.
  void run();

 private:
  void build_columns();
  bool eval_due() const;
  void write_manifest(const std::string& status) const;

  RunConfig cfg_;
  envs::BatchEnv env_;
  agent::Agent agent_;
  ppo::PpoLearner ppo_;
  std::unique_ptr<ssl::AuxLearner> aux_;
  auxmem::AuxMemory memory_;
  numerics::Rng rng_;
  int64_t global_step_ = 0;
  int64_t updates_ = 0;
  double wall_time_ = 0.0;  // accumulated at iteration boundaries
  std::vector<double> episode_return_;
  std::vector<std::string> columns_;
};

// Metrics columns shared by every run of an environment.
std::vector<std::string> metric_columns(const envs::EnvSpec& spec);

}  // namespace roto::harness
