#include "roto/analysis/pca.hpp"

#include <Eigen/SVD>
#include <sstream>
#include <stdexcept>

namespace roto::analysis {

Matrix PcaModel::transform(const Matrix& x) const {
  if (x.cols() != components.rows()) throw std::invalid_argument("PcaModel::transform: dimension mismatch");
  return (x.rowwise() - mean.row(0)) * components;
}

Matrix PcaModel::inverse_transform(const Matrix& s) const {
  if (s.cols() != components.cols()) throw std::invalid_argument("PcaModel::inverse_transform: dimension mismatch");
  return (s * components.transpose()).rowwise() + mean.row(0);
}

PcaResult pca_fit_transform(const Matrix& x, int num_components) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (num_components < 1 || num_components > d) {
    std::ostringstream os;
    os << "pca: requested " << num_components << " components from " << d << "-dimensional data";
    throw std::invalid_argument(os.str());
  }
  if (n <= num_components) throw std::invalid_argument("pca: need more samples than components");
  if (!numerics::all_finite(x)) throw numerics::NumericError("pca: non-finite input");

  PcaResult out;
  PcaModel& m = out.model;
  m.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - m.mean.row(0);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV().leftCols(num_components);
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0.0) v.col(c) *= -1.0;
  }
  m.components = v;
  const double denom = static_cast<double>(n - 1);
  const double total = sv.squaredNorm() / denom;
  m.explained_variance.resize(1, num_components);
  m.explained_variance_ratio.resize(1, num_components);
  for (int c = 0; c < num_components; ++c) {
    m.explained_variance(0, c) = sv(c) * sv(c) / denom;
    m.explained_variance_ratio(0, c) = total > 0.0 ? m.explained_variance(0, c) / total : 0.0;
  }
  out.scores = centered * m.components;
  return out;
}

}  // namespace roto::analysis
