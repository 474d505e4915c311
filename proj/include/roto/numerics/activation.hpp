#pragma once

#include <string>

#include "roto/numerics/matrix.hpp"

namespace roto::numerics {

enum class Activation { kIdentity, kElu, kTanh, kSigmoid };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation kind);

double elu(double x);
double sigmoid(double x);

Matrix activation(Activation kind, const Matrix& x);
// Gradient w.r.t. the pre-activation given the pre-activation, the output and
// the upstream gradient.
Matrix activation_backward(Activation kind, const Matrix& pre, const Matrix& post,
                           const Matrix& d_post);

inline constexpr double kLayerNormEps = 1e-5;

struct LayerNormCache {
  Matrix xhat;     // normalized input, before gain/offset
  Matrix inv_std;  // rows x 1
};

// Row-wise layer normalization with affine gain/offset (1 x cols each).
Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& offset,
                  LayerNormCache* cache = nullptr);
// Returns dX and accumulates into d_gain/d_offset.
Matrix layer_norm_backward(const LayerNormCache& cache, const Matrix& gain, const Matrix& d_out,
                           Matrix& d_gain, Matrix& d_offset);

}  // namespace roto::numerics
