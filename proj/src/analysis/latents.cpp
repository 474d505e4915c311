#include "roto/analysis/latents.hpp"

#include <json.hpp>
#include <stdexcept>
#include <vector>

#include "roto/analysis/pca.hpp"
#include "roto/envs/vec_env.hpp"

namespace roto::analysis {

namespace {

void check_agent(const agent::Agent& agent, const envs::EnvSpec& spec) {
  if (agent.config().obs_dim != spec.obs_dim || agent.config().action_dim != spec.action_dim) {
    throw std::invalid_argument("agent does not match environment " + envs::to_string(spec.id) +
                                " (obs " + std::to_string(spec.obs_dim) + ", actions " +
                                std::to_string(spec.action_dim) + ")");
  }
}

std::vector<double> row_of(const Matrix& m, Eigen::Index r) {
  return std::vector<double>(m.row(r).data(), m.row(r).data() + m.cols());
}

}  // namespace

void SampleSet::validate() const {
  if (z.rows() != s.rows()) throw std::invalid_argument("SampleSet: z and s have different counts");
  if (!numerics::all_finite(z) || !numerics::all_finite(s)) throw numerics::NumericError("SampleSet: non-finite entries");
}

SampleSet collect_samples(const agent::Agent& agent, envs::EnvConfig cfg, int n) {
  cfg.auto_reset = true;
  envs::BatchEnv env(cfg);
  const auto& spec = env.spec();
  check_agent(agent, spec);
  SampleSet out;
  out.z.resize(n, agent.config().latent_dim());
  out.s.resize(n, spec.gt_dim);
  int filled = 0;
  while (filled < n) {
    const Matrix z = agent.encode(env.observations());
    for (int i = 0; i < env.size() && filled < n; ++i, ++filled) {
      out.z.row(filled) = z.row(i);
      env.sim(i).write_ground_truth(std::span<double>(out.s.row(filled).data(), static_cast<size_t>(spec.gt_dim)));
    }
    env.step(agent.act(z, agent::ActMode::kDeterministic, nullptr).clamped);
  }
  return out;
}

LatentTrajectory rollout_latents(const agent::Agent& agent, envs::EnvConfig cfg, int episodes) {
  if (episodes < 1) throw std::invalid_argument("rollout_latents: episodes must be >= 1");
  cfg.batch = 1;
  cfg.auto_reset = true;
  envs::BatchEnv env(cfg);
  const auto& spec = env.spec();
  check_agent(agent, spec);
  std::vector<std::vector<double>> zs, ss;
  LatentTrajectory out;
  std::vector<double> contacts, tact(static_cast<size_t>(spec.tact_dim)), gt(static_cast<size_t>(spec.gt_dim));
  for (int ep = 0; ep < episodes; ++ep) {
    for (int t = 0;; ++t) {
      const Matrix z = agent.encode(env.observations());
      env.sim(0).write_tact(tact);
      env.sim(0).write_ground_truth(gt);
      double sum = 0.0;
      for (double v : tact) sum += v;
      out.episode.push_back(ep);
      out.t.push_back(t);
      zs.push_back(row_of(z, 0));
      ss.push_back(gt);
      contacts.push_back(sum);
      const auto& res = env.step(agent.act(z, agent::ActMode::kDeterministic, nullptr).clamped);
      if (res.terminated[0] || res.truncated[0]) break;
    }
  }
  const auto rows = static_cast<Eigen::Index>(zs.size());
  out.z.resize(rows, agent.config().latent_dim());
  out.s.resize(rows, spec.gt_dim);
  out.contacts.resize(rows, 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    out.z.row(r) = numerics::row_vector(zs[static_cast<size_t>(r)]);
    out.s.row(r) = numerics::row_vector(ss[static_cast<size_t>(r)]);
    out.contacts(r, 0) = contacts[static_cast<size_t>(r)];
  }
  return out;
}

void write_latents_jsonl(const LatentTrajectory& traj, std::ostream& out) {
  const int n = traj.size();
  const int d = static_cast<int>(std::min<Eigen::Index>(2, traj.z.cols()));
  Matrix scores = Matrix::Zero(n, d);
  if (n > d) scores = pca_fit_transform(traj.z, d).scores;
  for (int r = 0; r < n; ++r) {
    nlohmann::ordered_json j;
    j["episode"] = traj.episode[static_cast<size_t>(r)];
    j["t"] = traj.t[static_cast<size_t>(r)];
    j["z"] = row_of(traj.z, r);
    j["pca"] = row_of(scores, r);
    j["contact_sum"] = traj.contacts(r, 0);
    j["s"] = row_of(traj.s, r);
    out << j.dump() << '\n';
  }
}

}  // namespace roto::analysis
