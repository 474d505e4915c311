#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "roto/numerics/activation.hpp"
#include "roto/numerics/archive.hpp"
#include "roto/numerics/losses.hpp"
#include "roto/numerics/mlp.hpp"
#include "roto/numerics/optim.hpp"
#include "roto/numerics/parallel.hpp"
#include "roto/numerics/running_stats.hpp"
#include "test_util.hpp"

using namespace roto::numerics;
using roto::testing::max_fd_error;
using roto::testing::random_matrix;

namespace {

DenseLayer make_layer(Matrix w, Matrix b) {
  DenseLayer l;
  l.weight = std::move(w);
  l.bias = std::move(b);
  return l;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("linear_forward examples") {
  CHECK(linear_forward(make_layer(Matrix::Identity(2, 2), Matrix::Zero(1, 2)), row_vector({3, 4})) ==
        row_vector({3, 4}));
  Matrix w(2, 1);
  w << 1, 1;
  CHECK(linear_forward(make_layer(w, row_vector({1})), row_vector({2, 3}))(0, 0) == 6.0);
  CHECK(linear_forward(make_layer(Matrix::Zero(3, 1), row_vector({5})), row_vector({9, -2, 4}))(0, 0) ==
        5.0);
  CHECK_THROWS_AS(linear_forward(make_layer(w, row_vector({1})), row_vector({1, 2, 3})),
                  std::invalid_argument);
}

TEST_CASE("activations") {
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  CHECK(elu(-1.0) == doctest::Approx(-0.6321).epsilon(1e-4));
  CHECK(elu(2.5) == 2.5);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800.0)));
  CHECK(activation(Activation::kTanh, row_vector({0.3}))(0, 0) == doctest::Approx(std::tanh(0.3)));
  CHECK(activation_from_string("sigmoid") == Activation::kSigmoid);
  CHECK_THROWS(activation_from_string("relu"));
}

TEST_CASE("layer_norm examples") {
  Matrix one = Matrix::Ones(1, 3);
  Matrix zero = Matrix::Zero(1, 3);
  Matrix y = layer_norm(row_vector({1, 1, 1}), one, zero);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);

  // mean 0, variance 1 -> scaled by (1 + eps)^(-1/2)
  Matrix y2 = layer_norm(row_vector({1, -1}), Matrix::Ones(1, 2), Matrix::Zero(1, 2));
  const double s = 1.0 / std::sqrt(1.0 + kLayerNormEps);
  CHECK(y2(0, 0) == doctest::Approx(s).epsilon(1e-14));
  CHECK(y2(0, 1) == doctest::Approx(-s).epsilon(1e-14));

  Matrix y3 = layer_norm(row_vector({1, -1}), Matrix::Ones(1, 2), row_vector({0.7, 0.7}));
  CHECK(y3(0, 0) - y2(0, 0) == doctest::Approx(0.7));
  CHECK(y3(0, 1) - y2(0, 1) == doctest::Approx(0.7));
  CHECK_THROWS_AS(layer_norm(row_vector({1, 2}), one, zero), std::invalid_argument);
}

TEST_CASE("backward: linear sum gives all-ones input gradient") {
  Rng rng(1);
  MlpSpec spec{{3, 3}, Activation::kElu, Activation::kIdentity, {}};
  Mlp net(spec, rng);
  net.params().layers[0].weight = Matrix::Identity(3, 3);
  GradTape tape;
  Matrix x = row_vector({0.1, -2.0, 5.0});
  net.forward(x, &tape);
  ParamSet g = net.zero_grads();
  Matrix dx = net.backward(tape, Matrix::Ones(1, 3), g);
  CHECK(dx == Matrix::Ones(1, 3));
  CHECK_THROWS_AS(net.backward(tape, Matrix::Ones(1, 3), g), std::logic_error);
  GradTape empty;
  CHECK_THROWS_AS(net.backward(empty, Matrix::Ones(1, 3), g), std::logic_error);
}

TEST_CASE("BCE at logit 0 against target 0.5 has zero gradient") {
  LossGrad lg = weighted_bce_with_logits(Matrix::Zero(2, 3), Matrix::Constant(2, 3, 0.5), 1.0);
  CHECK(lg.grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("autodiff matches central differences for every activation/LayerNorm combination") {
  const Activation outs[] = {Activation::kIdentity, Activation::kElu, Activation::kTanh,
                             Activation::kSigmoid};
  Rng rng(42);
  for (Activation out : outs) {
    for (int ln = 0; ln < 2; ++ln) {
      for (int instance = 0; instance < 3; ++instance) {
        MlpSpec spec{{5, 7, 6, 4}, Activation::kElu, out,
                     std::vector<bool>(3, ln == 1)};
        Mlp net(spec, rng);
        if (ln) {
          for (auto& l : net.params().layers) {
            l.gain = random_matrix(rng, 1, l.gain.cols(), 0.5).array() + 1.0;
            l.offset = random_matrix(rng, 1, l.offset.cols(), 0.1);
          }
        }
        Matrix x = random_matrix(rng, 3, 5);
        Matrix target = random_matrix(rng, 3, 4);
        // Scalar loss: sum(target .* y) so every output contributes a distinct weight.
        auto loss = [&] { return net.forward(x).cwiseProduct(target).sum(); };
        GradTape tape;
        net.forward(x, &tape);
        ParamSet g = net.zero_grads();
        Matrix dx = net.backward(tape, target, g);
        auto params = net.params().tensors();
        auto grads = g.tensors();
        CAPTURE(to_string(out));
        CAPTURE(ln);
        CHECK(max_fd_error(loss, params, grads) < 1e-4);
        std::vector<Matrix*> xs{&x};
        std::vector<const Matrix*> dxs{&dx};
        CHECK(max_fd_error(loss, xs, dxs) < 1e-4);
      }
    }
  }
}

TEST_CASE("backward w.r.t. pre-activation composes with BCE-with-logits") {
  Rng rng(5);
  MlpSpec spec{{4, 6, 3}, Activation::kElu, Activation::kSigmoid, {}};
  Mlp net(spec, rng);
  Matrix x = random_matrix(rng, 5, 4);
  Matrix y = (random_matrix(rng, 5, 3).array() > 0.0).cast<double>().matrix();
  auto loss = [&] {
    Matrix p = net.forward(x);
    return weighted_bce(p, y, 10.0);
  };
  // Recover logits from the tape so the logits path is exercised.
  GradTape tape;
  Matrix p = net.forward(x, &tape);
  Matrix logits = p.unaryExpr([](double q) { return std::log(q / (1.0 - q)); });
  LossGrad lg = weighted_bce_with_logits(logits, y, 10.0);
  CHECK(lg.value == doctest::Approx(loss()).epsilon(1e-10));
  ParamSet g = net.zero_grads();
  net.backward(tape, lg.grad, g, GradWrt::kPreActivation);
  CHECK(max_fd_error(loss, net.params().tensors(), g.tensors()) < 1e-4);
}

TEST_CASE("gradient accumulation across two tapes sums") {
  Rng rng(9);
  Mlp net(MlpSpec{{3, 4, 2}, Activation::kElu, Activation::kTanh, {true, false}}, rng);
  Matrix a = random_matrix(rng, 2, 3), b = random_matrix(rng, 2, 3);
  Matrix wa = random_matrix(rng, 2, 2), wb = random_matrix(rng, 2, 2);
  GradTape ta, tb;
  net.forward(a, &ta);
  net.forward(b, &tb);
  ParamSet g = net.zero_grads();
  net.backward(ta, wa, g);
  net.backward(tb, wb, g);
  auto loss = [&] {
    return net.forward(a).cwiseProduct(wa).sum() + net.forward(b).cwiseProduct(wb).sum();
  };
  CHECK(max_fd_error(loss, net.params().tensors(), g.tensors()) < 1e-4);
}

TEST_CASE("losses") {
  LossGrad m = mse_loss(row_vector({1, 2}), row_vector({1, 4}));
  CHECK(m.value == 2.0);
  CHECK(m.grad(0, 1) == -2.0);
  CHECK(weighted_bce_with_logits(row_vector({0}), row_vector({1}), 10.0).value ==
        doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(weighted_bce(row_vector({0.5}), row_vector({0}), 10.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(std::isfinite(weighted_bce(row_vector({0.0}), row_vector({1}), 1.0)));
  CHECK(weighted_bce(row_vector({1.0, 0.0}), row_vector({1, 0}), 10.0) == 0.0);
  CHECK_THROWS_AS(mse_loss(row_vector({1}), row_vector({1, 2})), std::invalid_argument);
}

TEST_CASE("adam_step") {
  Matrix p = row_vector({1.0, -2.0, 3.0});
  std::vector<Matrix*> params{&p};
  AdamState st = AdamState::for_params(params);
  Matrix zero = Matrix::Zero(1, 3);
  adam_step(params, {&zero}, st, 0.1);
  CHECK(p == row_vector({1.0, -2.0, 3.0}));

  Matrix q = row_vector({1.0, -2.0, 3.0});
  std::vector<Matrix*> qs{&q};
  AdamState s2 = AdamState::for_params(qs);
  Matrix g = row_vector({0.5, -4.0, 1e-3});
  adam_step(qs, {&g}, s2, 0.01);
  // First bias-corrected step: delta = -lr * g / (|g| + eps) ~ -lr * sign(g)
  CHECK(q(0, 0) - 1.0 == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(q(0, 1) + 2.0 == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(q(0, 2) - 3.0 == doctest::Approx(-0.01).epsilon(1e-4));
  CHECK(s2.step == 1);

  Matrix r1 = row_vector({0.2, 0.3}), r2 = r1;
  std::vector<Matrix*> p1{&r1}, p2{&r2};
  AdamState a1 = AdamState::for_params(p1);
  Matrix gg = row_vector({0.7, -0.1});
  adam_step(p1, {&gg}, a1, 0.05);
  AdamState a2 = a1;
  Matrix r1b = r1;
  std::vector<Matrix*> p1b{&r1b};
  adam_step(p1, {&gg}, a1, 0.05);
  adam_step(p1b, {&gg}, a2, 0.05);
  CHECK(r1 == r1b);
  (void)p2;

  Matrix bad = row_vector({NAN, 0.0, 0.0});
  Matrix before = q;
  CHECK_THROWS_AS(adam_step(qs, {&bad}, s2, 0.01), NumericError);
  CHECK(q == before);
}

TEST_CASE("clip_global_norm") {
  Matrix a = row_vector({3, 4});
  std::vector<Matrix*> gs{&a};
  CHECK(clip_global_norm(gs, 1.0) == doctest::Approx(5.0));
  CHECK(a(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(a(0, 1) == doctest::Approx(0.8).epsilon(1e-15));

  Matrix b = row_vector({0.3, 0.4});
  std::vector<Matrix*> gb{&b};
  clip_global_norm(gb, 1.0);
  CHECK(b == row_vector({0.3, 0.4}));

  Matrix z = Matrix::Zero(2, 2);
  std::vector<Matrix*> gz{&z};
  clip_global_norm(gz, 1.0);
  CHECK(z.isZero(0.0));

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Matrix x = random_matrix(rng, 3, 4, rng.uniform(0.0, 10.0));
    Matrix y = random_matrix(rng, 1, 5, rng.uniform(0.0, 10.0));
    Matrix x0 = x;
    std::vector<Matrix*> g{&x, &y};
    const double max_norm = rng.uniform(0.1, 3.0);
    clip_global_norm(g, max_norm);
    CHECK(global_norm(const_view(g)) <= max_norm + 1e-12);
    // Direction preserved: x is a nonnegative multiple of x0.
    const double k = x.sum() / x0.sum();
    CHECK(k > 0.0);
    CHECK((x - k * x0).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS(clip_global_norm(gs, 0.0));
}

TEST_CASE("ema_update") {
  Rng rng(11);
  MlpSpec spec{{2, 3, 1}, Activation::kElu, Activation::kIdentity, {true, false}};
  Mlp online(spec, rng), target(spec, rng);
  for (Matrix* t : target.params().tensors()) t->setZero();
  for (Matrix* t : online.params().tensors()) t->setOnes();
  ema_update(target.params(), online.params(), 0.01);
  for (const Matrix* t : target.params().tensors()) {
    CHECK(t->isApproxToConstant(0.01, 1e-15));
  }

  Mlp a(spec, rng);
  ParamSet same = a.params();
  ema_update(same, a.params(), 0.3);
  auto s = same.tensors();
  auto o = a.params().tensors();
  for (size_t i = 0; i < s.size(); ++i) CHECK(*s[i] == *o[i]);

  Mlp b(spec, rng), c(spec, rng);
  ParamSet tgt = b.params();
  const ParamSet start = tgt;
  const int n = 25;
  for (int i = 0; i < n; ++i) ema_update(tgt, c.params(), 0.01);
  auto tt = tgt.tensors();
  auto t0 = start.tensors();
  auto on = c.params().tensors();
  for (size_t i = 0; i < tt.size(); ++i) {
    Matrix expected = std::pow(0.99, n) * (*t0[i] - *on[i]);
    CHECK(((*tt[i] - *on[i]) - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK_THROWS(ema_update(tgt, c.params(), 0.0));
}

TEST_CASE("RunningStats") {
  RunningStats c;
  for (int i = 0; i < 10; ++i) c.update(4.2);
  CHECK(c.normalize(4.2) == doctest::Approx(0.0));

  Rng rng(123);
  RunningStats big;
  std::vector<double> chunk;
  for (int i = 0; i < 1000000; ++i) {
    chunk.push_back(rng.normal(3.0, 2.0));
    if (chunk.size() == 997) {
      big.update(chunk);
      chunk.clear();
    }
  }
  big.update(chunk);
  CHECK(big.count() == 1000000);
  CHECK(std::abs(big.mean() - 3.0) < 0.03);
  CHECK(std::abs(std::sqrt(big.variance()) - 2.0) < 0.02);

  // Two-pass oracle, mixing single and batch updates, different orders.
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(rng.normal(-7.0, 0.01) + (i % 3) * 1e3);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / xs.size();
  RunningStats s1, s2;
  for (double x : xs) s1.update(x);
  s2.update(std::span<const double>(xs.data(), 1234));
  for (size_t i = 1234; i < 3000; ++i) s2.update(xs[i]);
  s2.update(std::span<const double>(xs.data() + 3000, xs.size() - 3000));
  CHECK(s1.count() == s2.count());
  CHECK(roto::testing::rel_err(s1.mean(), mean) < 1e-9);
  CHECK(roto::testing::rel_err(s1.variance(), var) < 1e-9);
  CHECK(roto::testing::rel_err(s2.mean(), mean) < 1e-9);
  CHECK(roto::testing::rel_err(s2.variance(), var) < 1e-9);
  CHECK(s1.denormalize(s1.normalize(12.5)) == doctest::Approx(12.5));

  RunningStats one;
  one.update(1.0);
  CHECK_THROWS_AS(one.normalize(1.0), std::logic_error);
}

TEST_CASE("Rng determinism and serialization") {
  Rng a(77), b(77);
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
  const std::string st = a.serialize();
  const double next = a.uniform();
  Rng c(0);
  c.deserialize(st);
  CHECK(c.uniform() == next);
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  Rng d(5);
  for (int i = 0; i < 1000; ++i) {
    const auto k = d.index(7);
    CHECK(k < 7);
  }
}

TEST_CASE("TensorArchive round trip is byte-identical") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "roto_archive_test";
  fs::create_directories(dir);
  Rng rng(8);
  Mlp net(MlpSpec{{4, 5, 2}, Activation::kElu, Activation::kTanh, {true, false}}, rng);
  auto params = net.params().tensors();
  AdamState adam = AdamState::for_params(params);
  ParamSet g = net.zero_grads();
  for (Matrix* t : g.tensors()) t->setConstant(0.3);
  adam_step(params, const_view(g.tensors()), adam, 1e-3);

  TensorArchive ar;
  ar.put_params("net.", net.params());
  ar.put_adam("adam.", adam);
  ar.meta()["step"] = 17;
  const std::string p1 = (dir / "a").string(), p2 = (dir / "b").string();
  ar.save(p1);
  TensorArchive back = TensorArchive::load(p1);
  back.save(p2);
  CHECK(slurp(p1 + ".json") == slurp(p2 + ".json"));
  CHECK(slurp(p1 + ".bin") == slurp(p2 + ".bin"));

  Mlp other(net.spec(), rng);
  back.get_params("net.", other.params());
  auto a = net.params().tensors();
  auto b = other.params().tensors();
  for (size_t i = 0; i < a.size(); ++i) CHECK(*a[i] == *b[i]);
  AdamState adam2 = AdamState::for_params(other.params().tensors());
  back.get_adam("adam.", adam2);
  CHECK(adam2.step == 1);
  CHECK(adam2.m[0] == adam.m[0]);
  CHECK(back.meta()["step"] == 17);

  CHECK_THROWS(TensorArchive::load((dir / "missing").string()));
  {
    std::ofstream trunc(p2 + ".bin", std::ios::trunc | std::ios::binary);
    trunc << "x";
  }
  CHECK_THROWS(TensorArchive::load(p2));
  fs::remove_all(dir);
}

TEST_CASE("parallel_for covers each index once and propagates errors") {
  set_worker_count(3);
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(parallel_for(10, [](size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
  set_worker_count(1);
}
