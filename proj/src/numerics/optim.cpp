#include "roto/numerics/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace roto::numerics {

AdamState AdamState::for_params(const std::vector<Matrix*>& params) {
  AdamState s;
  for (const Matrix* p : params) {
    s.m.push_back(Matrix::Zero(p->rows(), p->cols()));
    s.v.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
  return s;
}

void adam_step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: params/grads/state count mismatch");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], *grads[i], "adam_step");
    require_same_shape(*params[i], state.m[i], "adam_step state");
    if (!grads[i]->allFinite()) {
      throw NumericError("adam_step: non-finite gradient in tensor " + std::to_string(i));
    }
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    const Matrix& g = *grads[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    params[i]->array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.eps);
  }
}

double global_norm(const std::vector<const Matrix*>& grads) {
  double sq = 0.0;
  for (const Matrix* g : grads) sq += g->squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(const std::vector<Matrix*>& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  const double norm = global_norm(const_view(grads));
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (Matrix* g : grads) *g *= scale;
  }
  return norm;
}

void ema_update(ParamSet& target, const ParamSet& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("ema_update: tau must be in (0,1]");
  auto t = target.tensors();
  auto o = online.tensors();
  if (t.size() != o.size()) throw std::invalid_argument("ema_update: structure mismatch");
  for (size_t i = 0; i < t.size(); ++i) {
    require_same_shape(*t[i], *o[i], "ema_update");
    *t[i] += tau * (*o[i] - *t[i]);
  }
}

std::vector<const Matrix*> const_view(const std::vector<Matrix*>& v) {
  return {v.begin(), v.end()};
}

}  // namespace roto::numerics
