#include "roto/ppo/rollout.hpp"

namespace roto::ppo {

void RolloutBatch::validate() const {
  const auto n = static_cast<Eigen::Index>(rows());
  if (num_envs < 1 || length < 1 || obs.rows() != n || actions.rows() != n || log_prob.rows() != n ||
      rewards.rows() != n || values.rows() != n || value_preds.rows() != n || terminated.size() != static_cast<size_t>(n) ||
      truncated.size() != static_cast<size_t>(n) || bootstrap_values.rows() != num_envs ||
      bootstrap_obs.rows() != num_envs) {
    throw std::invalid_argument("RolloutBatch: inconsistent shapes");
  }
}

void ValueNormalizer::update(const Matrix& returns) {
  stats_.update(std::span<const double>(returns.data(), static_cast<size_t>(returns.size())));
}

RolloutBatch collect_rollout(envs::VecEnv& env, const agent::Agent& agent,
                             const ValueNormalizer& norm, int length, numerics::Rng& rng,
                             int64_t policy_version, const StepCallback& on_step) {
  const int b = env.size();
  const auto& spec = env.spec();
  RolloutBatch out;
  out.num_envs = b;
  out.length = length;
  out.policy_version = policy_version;
  const Eigen::Index n = static_cast<Eigen::Index>(b) * length;
  out.obs.resize(n, spec.obs_dim);
  out.actions.resize(n, spec.action_dim);
  out.log_prob.resize(n, 1);
  out.rewards.resize(n, 1);
  out.values.resize(n, 1);
  out.value_preds.resize(n, 1);
  out.terminated.assign(static_cast<size_t>(n), 0);
  out.truncated.assign(static_cast<size_t>(n), 0);

  for (int t = 0; t < length; ++t) {
    const Matrix& obs = env.observations();
    const Matrix z = agent.encode(obs);
    const agent::ActionSample s = agent.act(z, agent::ActMode::kStochastic, &rng);
    const Matrix v = agent.value(z);
    const Eigen::Index r0 = static_cast<Eigen::Index>(t) * b;
    out.obs.middleRows(r0, b) = obs;
    out.actions.middleRows(r0, b) = s.action;
    out.log_prob.middleRows(r0, b) = s.log_prob;
    out.value_preds.middleRows(r0, b) = v;
    for (int i = 0; i < b; ++i) out.values(r0 + i, 0) = norm.denormalize(v(i, 0));

    const envs::BatchStep& res = env.step(s.clamped);
    out.rewards.middleRows(r0, b) = res.reward;
    for (int i = 0; i < b; ++i) {
      out.terminated[static_cast<size_t>(r0 + i)] = res.terminated[static_cast<size_t>(i)];
      out.truncated[static_cast<size_t>(r0 + i)] = res.truncated[static_cast<size_t>(i)];
    }
    if (on_step) on_step(res);
  }
  out.bootstrap_obs = env.observations();
  const Matrix vb = agent.value(agent.encode(out.bootstrap_obs));
  out.bootstrap_values.resize(b, 1);
  for (int i = 0; i < b; ++i) out.bootstrap_values(i, 0) = norm.denormalize(vb(i, 0));
  return out;
}

}  // namespace roto::ppo
