#include "roto/analysis/ksg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "roto/analysis/digamma.hpp"
#include "roto/numerics/parallel.hpp"
#include "roto/numerics/rng.hpp"

namespace roto::analysis {

namespace {

Matrix standardize(const Matrix& x, const char* name, numerics::Rng& rng, double jitter) {
  if (!numerics::all_finite(x)) throw numerics::NumericError(std::string("ksg: non-finite ") + name);
  Matrix out = x.rowwise() - x.colwise().mean();
  bool degenerate = true;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double sd = std::sqrt(out.col(c).squaredNorm() / static_cast<double>(out.rows()));
    if (sd > 0.0) {
      out.col(c) /= sd;
      degenerate = false;
    }
  }
  if (degenerate) throw std::invalid_argument(std::string("ksg: all samples of ") + name + " are identical");
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += jitter * rng.normal();
  return out;
}

}  // namespace

double ksg_mi(const Matrix& x, const Matrix& y, const KsgOptions& opt) {
  const Eigen::Index n = x.rows();
  if (y.rows() != n) throw std::invalid_argument("ksg: X and Y have different sample counts");
  if (opt.k < 1 || n <= opt.k + 1) {
    std::ostringstream os;
    os << "ksg: need N > k + 1 (N=" << n << ", k=" << opt.k << ")";
    throw std::invalid_argument(os.str());
  }
  numerics::Rng rng(opt.seed);
  const Matrix xs = standardize(x, "X", rng, opt.jitter);
  const Matrix ys = standardize(y, "Y", rng, opt.jitter);
  const auto k = static_cast<size_t>(opt.k);

  std::vector<double> per_sample(static_cast<size_t>(n));
  numerics::parallel_for(static_cast<size_t>(n), [&](size_t i) {
    thread_local std::vector<double> dx, dy, dj;
    dx.resize(static_cast<size_t>(n));
    dy.resize(static_cast<size_t>(n));
    dj.clear();
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = (xs.row(j) - xs.row(ii)).cwiseAbs().maxCoeff();
      const double b = (ys.row(j) - ys.row(ii)).cwiseAbs().maxCoeff();
      dx[static_cast<size_t>(j)] = a;
      dy[static_cast<size_t>(j)] = b;
      if (j != ii) dj.push_back(std::max(a, b));
    }
    std::nth_element(dj.begin(), dj.begin() + static_cast<std::ptrdiff_t>(k - 1), dj.end());
    const double eps = dj[k - 1];
    int nx = 0, ny = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == ii) continue;
      if (dx[static_cast<size_t>(j)] < eps) ++nx;
      if (dy[static_cast<size_t>(j)] < eps) ++ny;
    }
    per_sample[i] = digamma(nx + 1.0) + digamma(ny + 1.0);
  });
  double mean = 0.0;
  for (double v : per_sample) mean += v;
  mean /= static_cast<double>(n);
  return digamma(static_cast<double>(opt.k)) + digamma(static_cast<double>(n)) - mean;
}

std::vector<double> marginal_mi(const Matrix& z, const Matrix& s, const KsgOptions& opt) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(s.cols()));
  for (Eigen::Index j = 0; j < s.cols(); ++j) out.push_back(ksg_mi(z, s.col(j), opt));
  return out;
}

}  // namespace roto::analysis
