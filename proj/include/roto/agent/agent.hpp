#pragma once

#include <cstdint>
#include <vector>

#include "roto/numerics/archive.hpp"
#include "roto/numerics/matrix.hpp"
#include "roto/numerics/mlp.hpp"
#include "roto/numerics/rng.hpp"

namespace roto::agent {

using numerics::Matrix;

struct AgentConfig {
  int obs_dim = 0;
  int action_dim = 0;
  std::vector<int> encoder_hidden = {1024, 512, 256};  // last entry is the latent size
  std::vector<int> policy_hidden = {128, 64};
  std::vector<int> value_hidden = {128, 64};
  double init_log_std = 0.0;
  double policy_output_scale = 0.01;

  int latent_dim() const { return encoder_hidden.back(); }
  void validate() const;
};

numerics::MlpSpec encoder_spec(const AgentConfig& cfg);
numerics::MlpSpec policy_spec(const AgentConfig& cfg);
numerics::MlpSpec value_spec(const AgentConfig& cfg);

enum class ActMode { kStochastic, kDeterministic };

struct ActionSample {
  Matrix action;    // B x A, Gaussian sample before clamping (the mean in deterministic mode)
  Matrix clamped;   // B x A, clamped to [-1, 1] for the environment
  Matrix mean;      // B x A
  Matrix log_prob;  // B x 1, of the unclamped action
  Matrix entropy;   // B x 1
};

struct ActionEval {
  Matrix log_prob;  // B x 1
  Matrix entropy;   // B x 1
  Matrix value;     // B x 1
};

// Diagonal Gaussian helpers. log_std is 1 x A.
Matrix gaussian_log_prob(const Matrix& mean, const Matrix& log_std, const Matrix& actions);
double gaussian_entropy(const Matrix& log_std);
// d log_prob / d mean (B x A) and d log_prob / d log_std (B x A).
void gaussian_log_prob_grad(const Matrix& mean, const Matrix& log_std, const Matrix& actions,
                            Matrix& d_mean, Matrix& d_log_std);

struct AgentGrads {
  numerics::ParamSet encoder;
  numerics::ParamSet policy;
  numerics::ParamSet value;
  Matrix log_std;

  std::vector<Matrix*> tensors();
  void set_zero();
};

// Shared encoder e, Gaussian policy head pi with state-independent log-std,
// and value head v.
class Agent {
 public:
  Agent() = default;
  Agent(AgentConfig cfg, numerics::Rng& rng);

  const AgentConfig& config() const { return cfg_; }
  numerics::Mlp& encoder() { return encoder_; }
  const numerics::Mlp& encoder() const { return encoder_; }
  numerics::Mlp& policy() { return policy_; }
  const numerics::Mlp& policy() const { return policy_; }
  numerics::Mlp& value_net() { return value_; }
  const numerics::Mlp& value_net() const { return value_; }
  Matrix& log_std() { return log_std_; }
  const Matrix& log_std() const { return log_std_; }

  Matrix encode(const Matrix& obs, numerics::GradTape* tape = nullptr) const;
  ActionSample act(const Matrix& z, ActMode mode, numerics::Rng* rng) const;
  ActionEval evaluate_actions(const Matrix& z, const Matrix& actions) const;
  Matrix value(const Matrix& z) const;

  AgentGrads zero_grads() const;
  // Encoder, policy, value and log-std tensors, in AgentGrads::tensors() order.
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;

  void save(numerics::TensorArchive& ar, const std::string& prefix = "agent.") const;
  void load(const numerics::TensorArchive& ar, const std::string& prefix = "agent.");

 private:
  AgentConfig cfg_;
  numerics::Mlp encoder_;
  numerics::Mlp policy_;
  numerics::Mlp value_;
  Matrix log_std_;
};

}  // namespace roto::agent
