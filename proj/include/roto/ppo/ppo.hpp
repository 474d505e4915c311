#pragma once

#include <cstdint>

#include "roto/agent/agent.hpp"
#include "roto/numerics/archive.hpp"
#include "roto/numerics/optim.hpp"
#include "roto/ppo/gae.hpp"
#include "roto/ppo/rollout.hpp"

namespace roto::ppo {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double ratio_clip = 0.2;
  double value_clip = 0.2;
  double c_value = 0.1;
  double c_entropy = 0.0;
  double lr = 3e-4;
  int rollout_length = 32;
  int minibatches = 4;
  int epochs = 5;
  double max_grad_norm = 1.0;
  bool normalize_advantages = true;

  void validate(int num_envs) const;
};

// Loss values and gradients for one minibatch of M samples.
struct PpoLossTerms {
  double clip = 0.0;     // -mean(min(rho*A, clip(rho)*A))
  double value = 0.0;    // mean(max((V-R)^2, (V_clipped-R)^2))
  double entropy = 0.0;  // -mean(entropy)
  double total = 0.0;    // clip + c_value*value + c_entropy*entropy
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  Matrix d_log_prob;  // dTotal/d new log-prob, M x 1
  Matrix d_value;     // dTotal/d normalized value prediction, M x 1
};

PpoLossTerms ppo_losses(const Matrix& new_log_prob, const Matrix& old_log_prob,
                        const Matrix& advantages, const Matrix& value, const Matrix& old_value,
                        const Matrix& target, double mean_entropy, const PpoConfig& cfg);

struct PpoMinibatch {
  Matrix obs;
  Matrix actions;
  Matrix old_log_prob;
  Matrix advantages;
  Matrix old_value;  // normalized
  Matrix target;     // normalized
};

// Forward and backward pass of the PPO total loss for one minibatch.
// Gradients are accumulated into `grads` (not zeroed here).
PpoLossTerms ppo_minibatch_grad(const agent::Agent& agent, const PpoMinibatch& mb,
                                const PpoConfig& cfg, agent::AgentGrads& grads);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy_loss = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;  // mean pre-clip global norm
  int steps = 0;
};

// PPO optimizer state: one Adam per network (encoder; policy with log-std;
// value) at a shared learning rate, and the return normalizer.
class PpoLearner {
 public:
  PpoLearner(agent::Agent& agent, PpoConfig cfg, uint64_t seed);

  const PpoConfig& config() const { return cfg_; }
  ValueNormalizer& value_normalizer() { return norm_; }
  const ValueNormalizer& value_normalizer() const { return norm_; }
  int64_t version() const { return version_; }
  numerics::Rng& rng() { return rng_; }

  // GAE, return statistics update, then epochs x minibatches of clipped PPO
  // steps through e, pi and v. Throws StaleBatchError if the batch was not
  // collected under the current version, NumericError on a non-finite loss.
  UpdateStats update(const RolloutBatch& batch);

  void save(numerics::TensorArchive& ar) const;
  void load(const numerics::TensorArchive& ar);

 private:
  agent::Agent& agent_;
  PpoConfig cfg_;
  ValueNormalizer norm_;
  numerics::AdamState adam_encoder_;
  numerics::AdamState adam_policy_;
  numerics::AdamState adam_value_;
  numerics::Rng rng_;
  int64_t version_ = 0;
};

}  // namespace roto::ppo
