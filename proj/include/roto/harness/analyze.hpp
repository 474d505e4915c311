#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "roto/agent/agent.hpp"
#include "roto/analysis/classification.hpp"
#include "roto/analysis/latents.hpp"
#include "roto/harness/config.hpp"

namespace roto::harness {

std::vector<std::string> ground_truth_names(envs::EnvId id);

struct LoadedAgent {
  RunConfig config;
  agent::Agent agent;
};
// Agent weights and run configuration from a training checkpoint.
LoadedAgent load_agent(const std::string& checkpoint);
// <run_dir>/checkpoints/latest.
std::string latest_checkpoint(const std::string& run_dir);

struct MiOptions {
  int samples = 5000;
  int pca = 13;
  int k = 4;
  int envs = 16;
  uint64_t seed = 0;
};

struct MiReport {
  int samples = 0;
  int pca = 0;
  int k = 0;
  int latent_dim = 0;
  double explained_variance = 0.0;  // retained fraction
  double mi_joint = 0.0;            // I(z; s) in nats
  std::vector<std::string> features;
  std::vector<double> mi_marginal;  // I(z; s_j)
  std::vector<int> ranking;         // feature indices by decreasing marginal MI
};

// KSG estimates on PCA-reduced latents paired with raw ground-truth states.
MiReport mi_from_samples(const analysis::SampleSet& samples, const std::vector<std::string>& features,
                         const MiOptions& opt);
MiReport analyze_mi(const agent::Agent& agent, envs::EnvConfig env, const MiOptions& opt);
nlohmann::ordered_json to_json(const MiReport& r);

struct TactilePredReport {
  analysis::ConfusionCounts total;  // summed over all logged updates
  analysis::ConfusionCounts last;   // final logged update
  analysis::ClassificationMetrics total_metrics{};
  analysis::ClassificationMetrics last_metrics{};
  int rows = 0;
};

// Contact-prediction quality from the aux_tp/fp/tn/fn columns of metrics.csv.
TactilePredReport analyze_tactile_pred(const std::string& run_dir);
nlohmann::ordered_json to_json(const TactilePredReport& r);

}  // namespace roto::harness
