#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "roto/agent/agent.hpp"
#include "roto/envs/env.hpp"
#include "roto/ppo/ppo.hpp"
#include "roto/ssl/aux_config.hpp"

namespace roto::harness {

// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalConfig {
  int every_updates = 10;
  int envs = 16;
  int episodes = 16;  // per evaluation, spread over `envs` environments
};

struct RunConfig {
  std::string name = "run";
  uint64_t seed = 0;
  int64_t total_steps = 1000000;
  std::string out_dir;
  envs::EnvConfig env;
  agent::AgentConfig agent;  // obs/action dims are filled from the environment
  ppo::PpoConfig ppo;
  ssl::AuxConfig aux;
  EvalConfig eval;
  int checkpoint_every_updates = 50;

  // Fills derived fields and checks every section. Throws ConfigError.
  void finalize();
  int64_t steps_per_update() const { return static_cast<int64_t>(env.batch) * ppo.rollout_length; }
  int64_t total_updates() const;
};

RunConfig parse_config(const std::string& toml_text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

// Canonical TOML rendering; parse_config(to_toml(c)) reproduces c exactly.
std::string to_toml(const RunConfig& cfg);

// FNV-1a over the canonical rendering without name, out_dir and total_steps,
// which do not change what a training step computes.
uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(uint64_t h);

// Checks the tunable hyperparameters against the sweep search ranges.
void validate_sweep_ranges(const RunConfig& cfg);

}  // namespace roto::harness
