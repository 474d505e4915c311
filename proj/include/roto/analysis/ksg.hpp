#pragma once

#include <cstdint>
#include <vector>

#include "roto/numerics/matrix.hpp"

namespace roto::analysis {

using numerics::Matrix;

struct KsgOptions {
  int k = 4;
  double jitter = 1e-10;  // scale of seeded Gaussian noise added after z-scoring
  uint64_t seed = 0;
};

// Kraskov-Stoegbauer-Grassberger estimator (algorithm 1), in nats:
//   I = psi(k) + psi(N) - < psi(n_x + 1) + psi(n_y + 1) >
// with max-norm distances and strict marginal counts. Columns are z-scored
// first. Exact O(N^2) neighbour search. Throws std::invalid_argument when X
// or Y has all rows identical, or N <= k + 1.
double ksg_mi(const Matrix& x, const Matrix& y, const KsgOptions& opt = {});

// ksg_mi(z, s.col(j)) for each column j of s.
std::vector<double> marginal_mi(const Matrix& z, const Matrix& s, const KsgOptions& opt = {});

}  // namespace roto::analysis
