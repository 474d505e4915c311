#include "roto/numerics/losses.hpp"

#include <algorithm>
#include <cmath>

#include "roto/numerics/activation.hpp"

namespace roto::numerics {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

LossGrad mse_loss(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mse_loss");
  const double n = static_cast<double>(pred.size());
  Matrix diff = pred - target;
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

LossGrad weighted_bce_with_logits(const Matrix& logits, const Matrix& target, double pos_weight) {
  require_same_shape(logits, target, "weighted_bce_with_logits");
  const double n = static_cast<double>(logits.size());
  LossGrad out;
  out.grad.resize(logits.rows(), logits.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double x = logits.data()[i];
    const double o = target.data()[i];
    // -log(sigmoid(x)) = softplus(-x); -log(1 - sigmoid(x)) = softplus(x)
    total += pos_weight * o * softplus(-x) + (1.0 - o) * softplus(x);
    const double s = sigmoid(x);
    out.grad.data()[i] = (pos_weight * o * (s - 1.0) + (1.0 - o) * s) / n;
  }
  out.value = total / n;
  return out;
}

double weighted_bce(const Matrix& probs, const Matrix& target, double pos_weight) {
  require_same_shape(probs, target, "weighted_bce");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs.data()[i];
    const double o = target.data()[i];
    const double log_p = std::max(std::log(p), -100.0);
    const double log_q = std::max(std::log1p(-p), -100.0);
    total -= pos_weight * o * log_p + (1.0 - o) * log_q;
  }
  return total / static_cast<double>(probs.size());
}

}  // namespace roto::numerics
