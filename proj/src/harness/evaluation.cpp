#include "roto/harness/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roto/envs/vec_env.hpp"
#include "roto/numerics/rng.hpp"

namespace roto::harness {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string physical_metric_name(envs::EnvId id) {
  switch (id) {
    case envs::EnvId::kFind2d: return "rdist_per_step";
    case envs::EnvId::kBounce2d: return "bounces";
    case envs::EnvId::kOrbit2d: return "rotations";
  }
  return "physical";
}

EvalReport evaluate(const agent::Agent& agent, envs::EnvConfig cfg, int num_envs, int episodes, uint64_t seed) {
  if (num_envs < 1 || episodes < 1) throw std::invalid_argument("evaluate: envs and episodes must be >= 1");
  const envs::EnvSpec spec = envs::make_spec(cfg);
  if (agent.config().obs_dim != spec.obs_dim || agent.config().action_dim != spec.action_dim) {
    throw std::invalid_argument("evaluate: agent does not match environment " + envs::to_string(cfg.env_id));
  }
  EvalReport r;
  r.env_id = cfg.env_id;
  r.term_names = spec.reward_terms;
  r.term_means.assign(spec.reward_terms.size(), 0.0);
  const size_t n_terms = spec.reward_terms.size();
  std::array<double, 3> ttf_sum{};
  std::array<int, 3> ttf_count{};
  int dist_term = -1;
  for (size_t k = 0; k < n_terms; ++k) {
    if (spec.reward_terms[k] == "dist") dist_term = static_cast<int>(k);
  }

  for (int round = 0; r.episodes < episodes; ++round) {
    cfg.batch = std::min(num_envs, episodes - r.episodes);
    cfg.seed = numerics::mix_seed(seed, static_cast<uint64_t>(round));
    cfg.auto_reset = true;
    envs::BatchEnv env(cfg);
    const int b = env.size();
    std::vector<uint8_t> active(static_cast<size_t>(b), 1);
    std::vector<double> ret(static_cast<size_t>(b), 0.0), phys(static_cast<size_t>(b), 0.0);
    std::vector<int> len(static_cast<size_t>(b), 0);
    std::vector<std::vector<double>> terms(static_cast<size_t>(b), std::vector<double>(n_terms, 0.0));
    std::vector<std::array<int, 3>> first(static_cast<size_t>(b), {-1, -1, -1});
    int remaining = b;
    while (remaining > 0) {
      const numerics::Matrix z = agent.encode(env.observations());
      const auto& res = env.step(agent.act(z, agent::ActMode::kDeterministic, nullptr).clamped);
      for (int i = 0; i < b; ++i) {
        const auto ui = static_cast<size_t>(i);
        if (!active[ui]) continue;
        ret[ui] += res.reward(i, 0);
        ++len[ui];
        for (size_t k = 0; k < n_terms; ++k) terms[ui][k] += res.terms(i, static_cast<Eigen::Index>(k));
        const envs::StepEvents& ev = res.events[ui];
        if (cfg.env_id == envs::EnvId::kBounce2d && ev.bounce) phys[ui] += 1.0;
        if (cfg.env_id == envs::EnvId::kOrbit2d && ev.rotation) phys[ui] += 1.0;
        if (cfg.env_id == envs::EnvId::kFind2d) {
          for (size_t k = 0; k < 3; ++k) {
            if (first[ui][k] < 0 && ev.distance < kFindTolerances[k]) first[ui][k] = len[ui];
          }
        }
        if (res.terminated[ui] || res.truncated[ui]) {
          active[ui] = 0;
          --remaining;
        }
      }
    }
    for (int i = 0; i < b; ++i) {
      const auto ui = static_cast<size_t>(i);
      r.returns.push_back(ret[ui]);
      r.lengths.push_back(len[ui]);
      for (size_t k = 0; k < n_terms; ++k) r.term_means[k] += terms[ui][k];
      if (cfg.env_id == envs::EnvId::kFind2d) {
        phys[ui] = dist_term >= 0 ? terms[ui][static_cast<size_t>(dist_term)] / len[ui] : 0.0;
        for (size_t k = 0; k < 3; ++k) {
          if (first[ui][k] >= 0) {
            ttf_sum[k] += first[ui][k];
            ++ttf_count[k];
          }
        }
      }
      r.physical.push_back(phys[ui]);
      ++r.episodes;
    }
  }

  const double n = r.episodes;
  double sum = 0.0, sq = 0.0;
  for (double v : r.returns) sum += v;
  r.return_mean = sum / n;
  for (double v : r.returns) sq += (v - r.return_mean) * (v - r.return_mean);
  r.return_std = std::sqrt(sq / n);
  for (double& t : r.term_means) t /= n;
  double ps = 0.0;
  for (double v : r.physical) ps += v;
  r.physical_mean = ps / n;
  r.physical_max = *std::max_element(r.physical.begin(), r.physical.end());
  r.physical_median = median(r.physical);
  for (size_t k = 0; k < 3; ++k) {
    r.time_to_find[k] = ttf_count[k] ? ttf_sum[k] / ttf_count[k] : std::numeric_limits<double>::quiet_NaN();
    r.found_fraction[k] = ttf_count[k] / n;
  }
  if (cfg.env_id != envs::EnvId::kFind2d) {
    r.time_to_find.fill(std::numeric_limits<double>::quiet_NaN());
    r.found_fraction.fill(std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

}  // namespace roto::harness
