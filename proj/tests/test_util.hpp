#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "roto/numerics/matrix.hpp"
#include "roto/numerics/rng.hpp"

namespace roto::testing {

using numerics::Matrix;

inline Matrix random_matrix(numerics::Rng& rng, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Worst relative error between an analytic gradient and central differences of
// loss() over every entry of each tensor in params. Perturbs in place and restores.
inline double max_fd_error(const std::function<double()>& loss, const std::vector<Matrix*>& params,
                           const std::vector<const Matrix*>& grads, double h = 1e-5,
                           size_t max_entries_per_tensor = 40) {
  double worst = 0.0;
  for (size_t t = 0; t < params.size(); ++t) {
    Matrix& p = *params[t];
    const size_t n = static_cast<size_t>(p.size());
    const size_t stride = std::max<size_t>(1, n / max_entries_per_tensor);
    for (size_t i = 0; i < n; i += stride) {
      double& x = p.data()[i];
      const double orig = x;
      x = orig + h;
      const double up = loss();
      x = orig - h;
      const double down = loss();
      x = orig;
      const double fd = (up - down) / (2.0 * h);
      const double an = grads[t]->data()[i];
      // Entries where both are negligible carry no signal for relative error.
      if (std::abs(fd) < 1e-7 && std::abs(an) < 1e-7) continue;
      worst = std::max(worst, rel_err(an, fd));
    }
  }
  return worst;
}

}  // namespace roto::testing

namespace roto::testing {

inline double max_fd_error(const std::function<double()>& loss, const std::vector<Matrix*>& params,
                           const std::vector<Matrix*>& grads, double h = 1e-5,
                           size_t max_entries_per_tensor = 40) {
  return max_fd_error(loss, params, std::vector<const Matrix*>(grads.begin(), grads.end()), h,
                      max_entries_per_tensor);
}

}  // namespace roto::testing
