#pragma once

#include "roto/numerics/matrix.hpp"

namespace roto::numerics {

struct LossGrad {
  double value = 0.0;
  Matrix grad;  // same shape as the prediction
};

// Mean squared error over all elements.
LossGrad mse_loss(const Matrix& pred, const Matrix& target);

// Positively weighted binary cross-entropy on logits, mean over elements:
//   -(w * o * log(sigmoid(x)) + (1 - o) * log(1 - sigmoid(x)))
// grad is w.r.t. the logits.
LossGrad weighted_bce_with_logits(const Matrix& logits, const Matrix& target, double pos_weight);

// Same loss on probabilities, with logs clamped at -100.
double weighted_bce(const Matrix& probs, const Matrix& target, double pos_weight);

}  // namespace roto::numerics
