#pragma once

#include <cstdint>
#include <vector>

#include "roto/numerics/matrix.hpp"
#include "roto/numerics/mlp.hpp"

namespace roto::numerics {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState for_params(const std::vector<Matrix*>& params);
};

// In-place Adam step with bias correction. Throws NumericError on a
// non-finite gradient before touching any parameter.
void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& state, double lr);

double global_norm(const std::vector<const Matrix*>& grads);
// Scales grads so their joint L2 norm is at most max_norm. Returns the norm
// before clipping.
double clip_global_norm(const std::vector<Matrix*>& grads, double max_norm = 1.0);

// target <- (1 - tau) * target + tau * online
void ema_update(ParamSet& target, const ParamSet& online, double tau = 0.01);

std::vector<const Matrix*> const_view(const std::vector<Matrix*>& v);

}  // namespace roto::numerics
