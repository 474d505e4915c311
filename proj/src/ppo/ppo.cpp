#include "roto/ppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace roto::ppo {

using numerics::GradTape;

void PpoConfig::validate(int num_envs) const {
  if (!(ratio_clip > 0.0) || !(value_clip > 0.0)) throw std::invalid_argument("ppo: clips must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0) || !(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("ppo: gamma in (0,1], lambda in [0,1]");
  }
  if (rollout_length < 1 || minibatches < 1 || epochs < 1) {
    throw std::invalid_argument("ppo: rollout_length, minibatches, epochs must be >= 1");
  }
  if ((num_envs * rollout_length) % minibatches != 0) {
    throw std::invalid_argument("ppo: minibatches must divide B*R");
  }
  if (lr < 0.0 || c_value < 0.0 || c_entropy < 0.0 || !(max_grad_norm > 0.0)) {
    throw std::invalid_argument("ppo: lr, c_value, c_entropy >= 0 and max_grad_norm > 0");
  }
}

PpoLossTerms ppo_losses(const Matrix& new_log_prob, const Matrix& old_log_prob,
                        const Matrix& advantages, const Matrix& value, const Matrix& old_value,
                        const Matrix& target, double mean_entropy, const PpoConfig& cfg) {
  const Eigen::Index m = new_log_prob.rows();
  const double inv_m = 1.0 / static_cast<double>(m);
  PpoLossTerms out;
  out.d_log_prob.resize(m, 1);
  out.d_value.resize(m, 1);
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double log_ratio = new_log_prob(i, 0) - old_log_prob(i, 0);
    const double rho = std::exp(log_ratio);
    const double a = advantages(i, 0);
    const double rho_c = std::clamp(rho, 1.0 - cfg.ratio_clip, 1.0 + cfg.ratio_clip);
    const double s1 = rho * a, s2 = rho_c * a;
    out.clip -= std::min(s1, s2) * inv_m;
    // The gradient flows through the unclipped surrogate whenever it is the minimum.
    out.d_log_prob(i, 0) = s1 <= s2 ? -a * rho * inv_m : 0.0;
    if (std::abs(rho - 1.0) > cfg.ratio_clip) clipped += 1.0;
    out.approx_kl += ((rho - 1.0) - log_ratio) * inv_m;

    const double v = value(i, 0), v_old = old_value(i, 0), r = target(i, 0);
    const double dv = v - v_old;
    const double v_c = v_old + std::clamp(dv, -cfg.value_clip, cfg.value_clip);
    const double l1 = (v - r) * (v - r), l2 = (v_c - r) * (v_c - r);
    if (l1 >= l2) {
      out.value += l1 * inv_m;
      out.d_value(i, 0) = cfg.c_value * 2.0 * (v - r) * inv_m;
    } else {
      out.value += l2 * inv_m;
      const bool inside = std::abs(dv) < cfg.value_clip;
      out.d_value(i, 0) = inside ? cfg.c_value * 2.0 * (v_c - r) * inv_m : 0.0;
    }
  }
  out.entropy = -mean_entropy;
  out.clip_fraction = clipped * inv_m;
  out.total = out.clip + cfg.c_value * out.value + cfg.c_entropy * out.entropy;
  return out;
}

PpoLossTerms ppo_minibatch_grad(const agent::Agent& agent, const PpoMinibatch& mb,
                                const PpoConfig& cfg, agent::AgentGrads& grads) {
  // One encoder pass feeds both heads.
  GradTape te, tp, tv;
  const Matrix z = agent.encode(mb.obs, &te);
  const Matrix mean = agent.policy().forward(z, &tp);
  const Matrix v = agent.value_net().forward(z, &tv);
  const Matrix new_lp = agent::gaussian_log_prob(mean, agent.log_std(), mb.actions);
  const double ent = agent::gaussian_entropy(agent.log_std());
  PpoLossTerms L = ppo_losses(new_lp, mb.old_log_prob, mb.advantages, v, mb.old_value, mb.target,
                              ent, cfg);
  if (!std::isfinite(L.total)) return L;

  Matrix d_mean, d_ls;
  agent::gaussian_log_prob_grad(mean, agent.log_std(), mb.actions, d_mean, d_ls);
  d_mean.array().colwise() *= L.d_log_prob.col(0).array();
  d_ls.array().colwise() *= L.d_log_prob.col(0).array();
  // The entropy term contributes -c_entropy to every log-std entry.
  grads.log_std.array() += d_ls.colwise().sum().array() - cfg.c_entropy;
  Matrix dz = agent.policy().backward(tp, d_mean, grads.policy);
  dz += agent.value_net().backward(tv, L.d_value, grads.value);
  agent.encoder().backward(te, dz, grads.encoder);
  return L;
}

PpoLearner::PpoLearner(agent::Agent& agent, PpoConfig cfg, uint64_t seed)
    : agent_(agent), cfg_(cfg), rng_(seed) {
  adam_encoder_ = numerics::AdamState::for_params(agent_.encoder().params().tensors());
  auto pol = agent_.policy().params().tensors();
  pol.push_back(&agent_.log_std());
  adam_policy_ = numerics::AdamState::for_params(pol);
  adam_value_ = numerics::AdamState::for_params(agent_.value_net().params().tensors());
}

UpdateStats PpoLearner::update(const RolloutBatch& batch) {
  batch.validate();
  cfg_.validate(batch.num_envs);
  if (batch.policy_version != version_) {
    std::ostringstream os;
    os << "ppo update: batch collected under policy version " << batch.policy_version
       << " but learner is at version " << version_;
    throw StaleBatchError(os.str());
  }
  GaeResult gae = compute_gae(batch, cfg_.gamma, cfg_.gae_lambda);
  if (!gae.advantages.allFinite()) throw numerics::NumericError("ppo update: non-finite advantages");
  norm_.update(gae.returns);
  Matrix adv = gae.advantages;
  if (cfg_.normalize_advantages) normalize_advantages(adv);
  const int n = batch.rows();
  // Old values stay in the normalization they were predicted under.
  const Matrix& old_value = batch.value_preds;
  Matrix target(n, 1);
  for (int r = 0; r < n; ++r) target(r, 0) = norm_.normalize(gae.returns(r, 0));

  agent::AgentGrads grads = agent_.zero_grads();
  auto enc_params = agent_.encoder().params().tensors();
  auto pol_params = agent_.policy().params().tensors();
  pol_params.push_back(&agent_.log_std());
  auto val_params = agent_.value_net().params().tensors();
  auto enc_grads = grads.encoder.tensors();
  auto pol_grads = grads.policy.tensors();
  pol_grads.push_back(&grads.log_std);
  auto val_grads = grads.value.tensors();
  const auto all_grads = grads.tensors();

  const int mb_size = n / cfg_.minibatches;
  std::vector<int> perm(static_cast<size_t>(n));
  UpdateStats stats;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = n - 1; k > 0; --k) {
      std::swap(perm[static_cast<size_t>(k)], perm[rng_.index(static_cast<uint64_t>(k) + 1)]);
    }
    for (int mb = 0; mb < cfg_.minibatches; ++mb) {
      const int m = mb_size;
      PpoMinibatch mbd;
      mbd.obs.resize(m, batch.obs.cols());
      mbd.actions.resize(m, batch.actions.cols());
      mbd.old_log_prob.resize(m, 1);
      mbd.advantages.resize(m, 1);
      mbd.old_value.resize(m, 1);
      mbd.target.resize(m, 1);
      for (int j = 0; j < m; ++j) {
        const int r = perm[static_cast<size_t>(mb * mb_size + j)];
        mbd.obs.row(j) = batch.obs.row(r);
        mbd.actions.row(j) = batch.actions.row(r);
        mbd.old_log_prob(j, 0) = batch.log_prob(r, 0);
        mbd.advantages(j, 0) = adv(r, 0);
        mbd.old_value(j, 0) = old_value(r, 0);
        mbd.target(j, 0) = target(r, 0);
      }
      grads.set_zero();
      PpoLossTerms L = ppo_minibatch_grad(agent_, mbd, cfg_, grads);
      if (!std::isfinite(L.total)) {
        std::ostringstream os;
        os << "ppo update: non-finite loss (clip=" << L.clip << ", value=" << L.value
           << ", entropy=" << L.entropy << ") at epoch " << epoch << " minibatch " << mb;
        throw numerics::NumericError(os.str());
      }

      const double norm = numerics::clip_global_norm(all_grads, cfg_.max_grad_norm);
      numerics::adam_step(enc_params, numerics::const_view(enc_grads), adam_encoder_, cfg_.lr);
      numerics::adam_step(pol_params, numerics::const_view(pol_grads), adam_policy_, cfg_.lr);
      numerics::adam_step(val_params, numerics::const_view(val_grads), adam_value_, cfg_.lr);

      stats.policy_loss += L.clip;
      stats.value_loss += L.value;
      stats.entropy_loss += L.entropy;
      stats.clip_fraction += L.clip_fraction;
      stats.approx_kl += L.approx_kl;
      stats.grad_norm += norm;
      stats.steps += 1;
    }
  }
  const double k = 1.0 / static_cast<double>(stats.steps);
  stats.policy_loss *= k;
  stats.value_loss *= k;
  stats.entropy_loss *= k;
  stats.clip_fraction *= k;
  stats.approx_kl *= k;
  stats.grad_norm *= k;
  version_ += 1;
  return stats;
}

void PpoLearner::save(numerics::TensorArchive& ar) const {
  ar.put_adam("ppo.adam_encoder.", adam_encoder_);
  ar.put_adam("ppo.adam_policy.", adam_policy_);
  ar.put_adam("ppo.adam_value.", adam_value_);
  const auto& s = norm_.stats();
  ar.meta()["ppo"] = {{"version", version_},
                      {"rng", rng_.serialize()},
                      {"return_stats", {{"count", s.count()}, {"mean", s.mean()}, {"m2", s.m2()}}}};
}

void PpoLearner::load(const numerics::TensorArchive& ar) {
  ar.get_adam("ppo.adam_encoder.", adam_encoder_);
  ar.get_adam("ppo.adam_policy.", adam_policy_);
  ar.get_adam("ppo.adam_value.", adam_value_);
  const auto& j = ar.meta().at("ppo");
  version_ = j.at("version").get<int64_t>();
  rng_.deserialize(j.at("rng").get<std::string>());
  const auto& rs = j.at("return_stats");
  norm_.stats().restore(rs.at("count").get<int64_t>(), rs.at("mean").get<double>(),
                        rs.at("m2").get<double>());
}

}  // namespace roto::ppo
