#pragma once

#include "roto/numerics/matrix.hpp"

namespace roto::analysis {

using numerics::Matrix;

struct PcaModel {
  Matrix mean;                       // 1 x d
  Matrix components;                 // d x D, orthonormal columns
  Matrix explained_variance;         // 1 x D, nonincreasing (divisor N - 1)
  Matrix explained_variance_ratio;   // 1 x D, fraction of total variance

  int input_dim() const { return static_cast<int>(components.rows()); }
  int num_components() const { return static_cast<int>(components.cols()); }
  Matrix transform(const Matrix& x) const;          // N x D
  Matrix inverse_transform(const Matrix& s) const;  // N x d
};

struct PcaResult {
  PcaModel model;
  Matrix scores;  // N x D
};

// Top-D principal directions of the centered data via SVD. Each component's
// largest-magnitude entry is made positive. Requires N > D and D <= d.
PcaResult pca_fit_transform(const Matrix& x, int num_components);

}  // namespace roto::analysis
