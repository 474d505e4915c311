#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "roto/analysis/classification.hpp"
#include "roto/analysis/digamma.hpp"
#include "roto/analysis/ksg.hpp"
#include "roto/analysis/latents.hpp"
#include "roto/analysis/pca.hpp"
#include "test_util.hpp"

using namespace roto::analysis;
using roto::numerics::Rng;
using roto::testing::random_matrix;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

void gaussian_pair(Rng& rng, int n, double rho, Matrix& x, Matrix& y) {
  x.resize(n, 1);
  y.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal();
    x(i, 0) = a;
    y(i, 0) = rho * a + std::sqrt(1.0 - rho * rho) * b;
  }
}

}  // namespace

TEST_CASE("digamma reference values and recurrence") {
  CHECK(std::abs(digamma(1.0) + kEulerGamma) < 1e-12);
  CHECK(std::abs(digamma(2.0) - (1.0 - kEulerGamma)) < 1e-12);
  CHECK(std::abs(digamma(0.5) - (-kEulerGamma - 2.0 * std::numbers::ln2)) < 1e-12);
  // psi(n) = H_{n-1} - gamma for integers.
  double h = 0.0;
  for (int k = 1; k < 200; ++k) {
    CHECK(std::abs(digamma(k) - (h - kEulerGamma)) < 1e-10);
    h += 1.0 / k;
  }
  for (double x = 0.5; x <= 100.0; x += 0.37) CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12);
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-1.5), std::domain_error);
}

TEST_CASE("PCA: lossless case, orthonormality, sign rule, errors") {
  Rng rng(1);
  Matrix x = random_matrix(rng, 200, 3) * random_matrix(rng, 3, 3);
  x = x.rowwise() - x.colwise().mean();
  const PcaResult r = pca_fit_transform(x, 3);
  const Matrix& v = r.model.components;
  CHECK((v.transpose() * v - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((r.model.inverse_transform(r.scores) - x).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(r.model.explained_variance_ratio.sum() - 1.0) < 1e-12);
  for (int c = 0; c < 3; ++c) {
    Eigen::Index arg;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(v(arg, c) > 0.0);
    if (c > 0) CHECK(r.model.explained_variance(0, c) <= r.model.explained_variance(0, c - 1));
  }
  CHECK_THROWS_AS(pca_fit_transform(x, 4), std::invalid_argument);
  CHECK_THROWS_AS(pca_fit_transform(x.topRows(3), 3), std::invalid_argument);
}

TEST_CASE("PCA: isotropic explained variance, duplication invariance, variance never increases") {
  Rng rng(2);
  const Matrix x = random_matrix(rng, 10000, 5);
  const PcaResult r = pca_fit_transform(x, 2);
  CHECK(std::abs(r.model.explained_variance_ratio.sum() - 0.4) < 0.05);

  const Matrix small = random_matrix(rng, 50, 6) * random_matrix(rng, 6, 6);
  Matrix dup(100, 6);
  dup << small, small;
  const PcaResult a = pca_fit_transform(small, 4), b = pca_fit_transform(dup, 4);
  CHECK((a.model.components - b.model.components).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.model.mean - b.model.mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.model.explained_variance_ratio - b.model.explained_variance_ratio).cwiseAbs().maxCoeff() < 1e-12);

  for (int d = 1; d <= 6; ++d) {
    const PcaResult p = pca_fit_transform(small, d);
    const Matrix back = p.model.inverse_transform(p.scores);
    const Matrix c0 = small.rowwise() - small.colwise().mean();
    const Matrix c1 = back.rowwise() - back.colwise().mean();
    CHECK(c1.squaredNorm() <= c0.squaredNorm() * (1.0 + 1e-12));
  }
}

TEST_CASE("KSG: independence, Gaussian oracle, deterministic dependence, permutation") {
  Rng rng(3);
  Matrix x, y;
  gaussian_pair(rng, 5000, 0.0, x, y);
  const double i0 = ksg_mi(x, y);
  CHECK(std::abs(i0) < 0.05);
  gaussian_pair(rng, 5000, 0.9, x, y);
  const double i9 = ksg_mi(x, y);
  MESSAGE("rho=0: " << i0 << "  rho=0.9: " << i9);
  CHECK(std::abs(i9 - (-0.5 * std::log(1.0 - 0.81))) < 0.05);

  // Permuting samples: the estimate does not depend on order.
  Matrix xp = x, yp = y;
  for (int i = 0; i < 5000; ++i) {
    const int j = static_cast<int>(rng.index(5000));
    xp.row(i).swap(xp.row(j));
    yp.row(i).swap(yp.row(j));
  }
  CHECK(std::abs(ksg_mi(xp, yp) - i9) < 1e-9);

  Matrix u = random_matrix(rng, 5000, 1);
  CHECK(ksg_mi(u, u) > ksg_mi(u.topRows(500), u.topRows(500)));

  CHECK_THROWS_AS(ksg_mi(Matrix::Constant(100, 2, 3.0), u.topRows(100)), std::invalid_argument);
  CHECK_THROWS_AS(ksg_mi(u.topRows(5), u.topRows(5)), std::invalid_argument);
  CHECK_THROWS_AS(ksg_mi(u.topRows(10), u.topRows(11)), std::invalid_argument);
}

TEST_CASE("marginal MI ranks the embedded feature first; noise feature near zero") {
  Rng rng(4);
  const int n = 2000;
  Matrix s = random_matrix(rng, n, 3);
  Matrix z = random_matrix(rng, n, 4);
  z.col(2) = s.col(0) + 0.3 * random_matrix(rng, n, 1);
  const std::vector<double> mi = marginal_mi(z, s);
  MESSAGE(mi[0] << " " << mi[1] << " " << mi[2]);
  CHECK(mi[0] > mi[1]);
  CHECK(mi[0] > mi[2]);
  CHECK(std::abs(mi[1]) < 0.05);
  CHECK(std::abs(mi[2]) < 0.05);
}

TEST_CASE("classification metrics: definitions, degenerate denominators, brute-force recount") {
  ConfusionCounts c{90, 0, 0, 10};
  CHECK(classification_metrics(c).tpr == doctest::Approx(0.9));
  const ConfusionCounts neg{0, 0, 50, 0};
  const auto m = classification_metrics(neg);
  CHECK(m.tnr == 1.0);
  CHECK(std::isnan(m.precision));
  CHECK(std::isnan(m.tpr));

  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng.index(64);
    std::vector<double> prob(n), label(n);
    const double base = rng.uniform();
    for (size_t i = 0; i < n; ++i) {
      prob[i] = rng.uniform();
      label[i] = rng.uniform() < base ? 1.0 : 0.0;
    }
    const ConfusionCounts got = ConfusionCounts::from_arrays(prob, label);
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (size_t i = 0; i < n; ++i) {
      const int p = prob[i] >= 0.5, t = label[i] == 1.0;
      tp += p & t;
      fp += p & !t;
      tn += !p & !t;
      fn += !p & t;
    }
    REQUIRE(got == ConfusionCounts{tp, fp, tn, fn});
    REQUIRE(got.total() == static_cast<int64_t>(n));
    const auto r = classification_metrics(got);
    if (tp + fn > 0) {
      REQUIRE(r.tpr == static_cast<double>(tp) / static_cast<double>(tp + fn));
      REQUIRE(std::abs(r.tpr + r.fnr - 1.0) < 1e-15);
    }
    if (tn + fp > 0) {
      REQUIRE(r.tnr == static_cast<double>(tn) / static_cast<double>(tn + fp));
      REQUIRE(std::abs(r.tnr + r.fpr - 1.0) < 1e-15);
    }
    if (tp + fp > 0) REQUIRE(r.precision == static_cast<double>(tp) / static_cast<double>(tp + fp));
    REQUIRE(r.accuracy == static_cast<double>(tp + tn) / static_cast<double>(n));
  }
}

TEST_CASE("latent export: record count, contact bound, byte-identical re-export") {
  auto cfg = roto::envs::EnvConfig::defaults(roto::envs::EnvId::kBounce2d);
  cfg.episode_length = 40;
  cfg.seed = 9;
  const auto spec = roto::envs::make_spec(cfg);
  roto::agent::AgentConfig ac;
  ac.obs_dim = spec.obs_dim;
  ac.action_dim = spec.action_dim;
  ac.encoder_hidden = {32, 16};
  Rng rng(6);
  const roto::agent::Agent agent(ac, rng);
  const LatentTrajectory tr = rollout_latents(agent, cfg, 2);
  const int e0 = static_cast<int>(std::count(tr.episode.begin(), tr.episode.end(), 0));
  CHECK(e0 >= 1);
  CHECK(e0 <= 40);
  CHECK(tr.size() == static_cast<int>(tr.z.rows()));
  CHECK(tr.contacts.minCoeff() >= 0.0);
  CHECK(tr.contacts.maxCoeff() <= spec.tact_dim);
  std::ostringstream a, b;
  write_latents_jsonl(tr, a);
  write_latents_jsonl(rollout_latents(agent, cfg, 2), b);
  const std::string text = a.str();
  CHECK(text == b.str());
  CHECK(std::count(text.begin(), text.end(), '\n') == tr.size());

  const SampleSet ss = collect_samples(agent, cfg, 100);
  CHECK(ss.z.rows() == 100);
  CHECK(ss.s.cols() == spec.gt_dim);
  CHECK_NOTHROW(ss.validate());

  auto other = roto::envs::EnvConfig::defaults(roto::envs::EnvId::kFind2d);
  CHECK_THROWS_AS(rollout_latents(agent, other, 1), std::invalid_argument);
}
