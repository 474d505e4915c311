#pragma once

#include <cstdint>
#include <ostream>

#include "roto/agent/agent.hpp"
#include "roto/envs/env.hpp"
#include "roto/numerics/matrix.hpp"

namespace roto::analysis {

using numerics::Matrix;

// Paired latents and ground-truth states.
struct SampleSet {
  Matrix z;  // N x latent
  Matrix s;  // N x gt_dim
  void validate() const;
};

// Runs the deterministic policy on cfg.batch environments (auto reset on) and
// records (e(o_t), s_t) for every env and step until n samples exist.
SampleSet collect_samples(const agent::Agent& agent, envs::EnvConfig cfg, int n);

// Per-step record of deterministic episodes on one environment.
struct LatentTrajectory {
  std::vector<int> episode;
  std::vector<int> t;
  Matrix z;         // T x latent
  Matrix contacts;  // T x 1, number of active sensors in the current frame
  Matrix s;         // T x gt_dim
  int size() const { return static_cast<int>(t.size()); }
};

LatentTrajectory rollout_latents(const agent::Agent& agent, envs::EnvConfig cfg, int episodes);

// JSON lines {"episode","t","z","pca","contact_sum","s"}, with a 2-component
// PCA fitted on all recorded latents.
void write_latents_jsonl(const LatentTrajectory& traj, std::ostream& out);

}  // namespace roto::analysis
