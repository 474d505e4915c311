#include "roto/numerics/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace roto::numerics {

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "elu") return Activation::kElu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::kIdentity: return "identity";
    case Activation::kElu: return "elu";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix activation(Activation kind, const Matrix& x) {
  switch (kind) {
    case Activation::kIdentity: return x;
    case Activation::kElu: return x.unaryExpr([](double v) { return elu(v); });
    case Activation::kTanh: return x.array().tanh().matrix();
    case Activation::kSigmoid: return x.unaryExpr([](double v) { return sigmoid(v); });
  }
  return x;
}

Matrix activation_backward(Activation kind, const Matrix& pre, const Matrix& post,
                           const Matrix& d_post) {
  switch (kind) {
    case Activation::kIdentity: return d_post;
    case Activation::kElu:
      // d/dx = 1 for x > 0, e^x = elu(x) + 1 otherwise.
      return (pre.array() > 0.0).select(d_post.array(), d_post.array() * (post.array() + 1.0));
    case Activation::kTanh:
      return (d_post.array() * (1.0 - post.array().square())).matrix();
    case Activation::kSigmoid:
      return (d_post.array() * post.array() * (1.0 - post.array())).matrix();
  }
  return d_post;
}

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& offset,
                  LayerNormCache* cache) {
  if (gain.cols() != x.cols() || offset.cols() != x.cols()) {
    throw std::invalid_argument("layer_norm: gain/offset length must equal x.cols");
  }
  const double n = static_cast<double>(x.cols());
  Matrix mean = x.rowwise().sum() / n;
  Matrix centered = x.colwise() - mean.col(0);
  Matrix var = centered.array().square().rowwise().sum().matrix() / n;
  Matrix inv_std = (var.array() + kLayerNormEps).rsqrt().matrix();
  Matrix xhat = centered.array().colwise() * inv_std.col(0).array();
  Matrix y = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + offset.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix layer_norm_backward(const LayerNormCache& cache, const Matrix& gain, const Matrix& d_out,
                           Matrix& d_gain, Matrix& d_offset) {
  const double n = static_cast<double>(d_out.cols());
  d_gain += (d_out.array() * cache.xhat.array()).colwise().sum().matrix();
  d_offset += d_out.colwise().sum();
  Matrix dxhat = d_out.array().rowwise() * gain.row(0).array();
  Matrix sum_dxhat = dxhat.rowwise().sum();
  Matrix sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).rowwise().sum().matrix();
  // dx = inv_std / n * (n*dxhat - sum(dxhat) - xhat*sum(dxhat*xhat))
  Matrix dx = (n * dxhat.array()).colwise() - sum_dxhat.col(0).array();
  dx.array() -= cache.xhat.array().colwise() * sum_dxhat_xhat.col(0).array();
  dx.array().colwise() *= cache.inv_std.col(0).array() / n;
  return dx;
}

}  // namespace roto::numerics
