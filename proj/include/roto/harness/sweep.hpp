#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roto/harness/config.hpp"
#include "roto/harness/metrics_log.hpp"
#include "roto/harness/tpe.hpp"

namespace roto::harness {

struct SweepOptions {
  int trials = 20;
  int startup = 5;
  double gamma = 0.25;
  int candidates = 24;
  bool random_search = false;
  double final_fraction = 0.1;  // objective window at the end of training
  uint64_t seed = 0;
};

// The tunable hyperparameters that apply to `base`: PPO settings always,
// auxiliary weight and learning rate when an objective is set, the horizon
// for sequence objectives and the memory size when base uses N > 1.
SearchSpace sweep_space(const RunConfig& base);
RunConfig apply_point(const RunConfig& base, const SearchSpace& space, const Point& x);

// Mean eval_return_mean over evaluation rows in the final `fraction` of the
// run's steps. Throws if no evaluation falls in that window.
double final_window_objective(const MetricsTable& table, double fraction);

using TrialRunner = std::function<double(const RunConfig& trial_cfg, int trial)>;
// Trains trial_cfg into its out_dir and returns the final-window objective.
TrialRunner training_runner(double final_fraction);

struct SweepResult {
  SearchSpace space;
  std::vector<Trial> trials;
  int best = -1;
  RunConfig best_config;
};

// Runs the sweep; trial i writes to <base.out_dir>/trial_<i>. Writes
// trials.json, trials.csv and best.toml to base.out_dir. Throws
// std::runtime_error when every trial failed.
SweepResult run_sweep(const RunConfig& base, const SweepOptions& opts, const TrialRunner& runner);

void write_trials(const std::string& dir, const SweepResult& result, const SweepOptions& opts);

}  // namespace roto::harness
