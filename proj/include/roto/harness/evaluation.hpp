#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "roto/agent/agent.hpp"
#include "roto/envs/env.hpp"

namespace roto::harness {

// Find-2D time-to-find tolerances (m).
inline constexpr std::array<double, 3> kFindTolerances = {0.03, 0.01, 0.0005};

struct EvalReport {
  envs::EnvId env_id = envs::EnvId::kFind2d;
  int episodes = 0;
  std::vector<double> returns;
  std::vector<int> lengths;
  double return_mean = 0.0;
  double return_std = 0.0;
  std::vector<std::string> term_names;
  std::vector<double> term_means;  // unscaled per-episode sums, averaged

  // Per-episode physical metric: r_dist per step (find2d), bounces (bounce2d),
  // completed rotations (orbit2d).
  std::vector<double> physical;
  double physical_mean = 0.0;
  double physical_max = 0.0;
  double physical_median = 0.0;

  // find2d: mean first step within each tolerance over episodes that got
  // there (NaN if none did), and the fraction that did.
  std::array<double, 3> time_to_find{};
  std::array<double, 3> found_fraction{};
};

std::string physical_metric_name(envs::EnvId id);

// Deterministic-mode episodes on fresh environments seeded from `seed`,
// `envs` at a time. Touches no training state.
EvalReport evaluate(const agent::Agent& agent, envs::EnvConfig cfg, int envs, int episodes, uint64_t seed);

}  // namespace roto::harness
