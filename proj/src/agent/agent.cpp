#include "roto/agent/agent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roto::agent {

using numerics::Activation;
using numerics::MlpSpec;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::vector<int> sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  if (out > 0) s.push_back(out);
  return s;
}

}  // namespace

void AgentConfig::validate() const {
  if (obs_dim <= 0 || action_dim <= 0) throw std::invalid_argument("AgentConfig: obs/action dims");
  if (encoder_hidden.empty()) throw std::invalid_argument("AgentConfig: encoder needs a layer");
  if (policy_hidden.empty() || value_hidden.empty()) {
    throw std::invalid_argument("AgentConfig: policy/value need hidden layers");
  }
}

MlpSpec encoder_spec(const AgentConfig& cfg) {
  MlpSpec s{sizes(cfg.obs_dim, cfg.encoder_hidden, 0), Activation::kElu, Activation::kElu, {}};
  s.layer_norm.assign(cfg.encoder_hidden.size(), true);
  return s;
}

MlpSpec policy_spec(const AgentConfig& cfg) {
  return {sizes(cfg.latent_dim(), cfg.policy_hidden, cfg.action_dim), Activation::kElu,
          Activation::kTanh, {}};
}

MlpSpec value_spec(const AgentConfig& cfg) {
  return {sizes(cfg.latent_dim(), cfg.value_hidden, 1), Activation::kElu, Activation::kIdentity, {}};
}

Matrix gaussian_log_prob(const Matrix& mean, const Matrix& log_std, const Matrix& actions) {
  numerics::require_same_shape(mean, actions, "gaussian_log_prob");
  Matrix out(mean.rows(), 1);
  const Eigen::Index a = mean.cols();
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < a; ++j) {
      const double s = log_std(0, j);
      const double z = (actions(i, j) - mean(i, j)) * std::exp(-s);
      lp += -0.5 * z * z - s - kHalfLog2Pi;
    }
    out(i, 0) = lp;
  }
  return out;
}

double gaussian_entropy(const Matrix& log_std) {
  const double per_dim = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return static_cast<double>(log_std.cols()) * per_dim + log_std.sum();
}

void gaussian_log_prob_grad(const Matrix& mean, const Matrix& log_std, const Matrix& actions,
                            Matrix& d_mean, Matrix& d_log_std) {
  d_mean.resize(mean.rows(), mean.cols());
  d_log_std.resize(mean.rows(), mean.cols());
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    for (Eigen::Index j = 0; j < mean.cols(); ++j) {
      const double inv_var = std::exp(-2.0 * log_std(0, j));
      const double diff = actions(i, j) - mean(i, j);
      d_mean(i, j) = diff * inv_var;
      d_log_std(i, j) = diff * diff * inv_var - 1.0;
    }
  }
}

std::vector<Matrix*> AgentGrads::tensors() {
  std::vector<Matrix*> out = encoder.tensors();
  for (Matrix* t : policy.tensors()) out.push_back(t);
  for (Matrix* t : value.tensors()) out.push_back(t);
  out.push_back(&log_std);
  return out;
}

void AgentGrads::set_zero() {
  for (Matrix* t : tensors()) t->setZero();
}

Agent::Agent(AgentConfig cfg, numerics::Rng& rng) : cfg_(std::move(cfg)) {
  cfg_.validate();
  encoder_ = numerics::Mlp(encoder_spec(cfg_), rng);
  policy_ = numerics::Mlp(policy_spec(cfg_), rng, cfg_.policy_output_scale);
  value_ = numerics::Mlp(value_spec(cfg_), rng);
  log_std_ = Matrix::Constant(1, cfg_.action_dim, cfg_.init_log_std);
}

Matrix Agent::encode(const Matrix& obs, numerics::GradTape* tape) const {
  if (obs.cols() != cfg_.obs_dim) {
    throw std::invalid_argument("Agent::encode: expected " + std::to_string(cfg_.obs_dim) +
                                " observation columns, got " + std::to_string(obs.cols()));
  }
  return encoder_.forward(obs, tape);
}

ActionSample Agent::act(const Matrix& z, ActMode mode, numerics::Rng* rng) const {
  ActionSample s;
  s.mean = policy_.forward(z);
  if (mode == ActMode::kDeterministic) {
    s.action = s.mean;
  } else {
    if (!rng) throw std::invalid_argument("Agent::act: stochastic mode needs an rng");
    s.action.resize(s.mean.rows(), s.mean.cols());
    for (Eigen::Index i = 0; i < s.mean.rows(); ++i) {
      for (Eigen::Index j = 0; j < s.mean.cols(); ++j) {
        s.action(i, j) = s.mean(i, j) + std::exp(log_std_(0, j)) * rng->normal();
      }
    }
  }
  s.clamped = s.action.cwiseMax(-1.0).cwiseMin(1.0);
  s.log_prob = gaussian_log_prob(s.mean, log_std_, s.action);
  s.entropy = Matrix::Constant(s.mean.rows(), 1, gaussian_entropy(log_std_));
  return s;
}

ActionEval Agent::evaluate_actions(const Matrix& z, const Matrix& actions) const {
  ActionEval e;
  const Matrix mean = policy_.forward(z);
  e.log_prob = gaussian_log_prob(mean, log_std_, actions);
  e.entropy = Matrix::Constant(mean.rows(), 1, gaussian_entropy(log_std_));
  e.value = value_.forward(z);
  return e;
}

Matrix Agent::value(const Matrix& z) const { return value_.forward(z); }

AgentGrads Agent::zero_grads() const {
  AgentGrads g{encoder_.zero_grads(), policy_.zero_grads(), value_.zero_grads(),
               Matrix::Zero(1, cfg_.action_dim)};
  return g;
}

std::vector<Matrix*> Agent::tensors() {
  std::vector<Matrix*> out = encoder_.params().tensors();
  for (Matrix* t : policy_.params().tensors()) out.push_back(t);
  for (Matrix* t : value_.params().tensors()) out.push_back(t);
  out.push_back(&log_std_);
  return out;
}

std::vector<const Matrix*> Agent::tensors() const {
  std::vector<const Matrix*> out = encoder_.params().tensors();
  for (const Matrix* t : policy_.params().tensors()) out.push_back(t);
  for (const Matrix* t : value_.params().tensors()) out.push_back(t);
  out.push_back(&log_std_);
  return out;
}

void Agent::save(numerics::TensorArchive& ar, const std::string& prefix) const {
  ar.put_params(prefix + "encoder.", encoder_.params());
  ar.put_params(prefix + "policy.", policy_.params());
  ar.put_params(prefix + "value.", value_.params());
  ar.put(prefix + "log_std", log_std_);
}

void Agent::load(const numerics::TensorArchive& ar, const std::string& prefix) {
  ar.get_params(prefix + "encoder.", encoder_.params());
  ar.get_params(prefix + "policy.", policy_.params());
  ar.get_params(prefix + "value.", value_.params());
  const Matrix& ls = ar.get(prefix + "log_std");
  numerics::require_same_shape(log_std_, ls, "log_std");
  log_std_ = ls;
}

}  // namespace roto::agent
