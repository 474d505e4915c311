#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "roto/harness/analyze.hpp"
#include "roto/harness/checkpoint.hpp"
#include "roto/harness/sweep.hpp"
#include "roto/harness/trainer.hpp"

using namespace roto::harness;
namespace fs = std::filesystem;
using roto::numerics::Rng;

namespace {

const char* kSmallConfig = R"(
name = "small"
seed = 7
total_steps = 256

[env]
id = "bounce2d"
batch = 4
history = 2
episode_length = 40

[agent]
encoder_hidden = [32, 16]
policy_hidden = [16]
value_hidden = [16]

[ppo]
rollout_length = 8
minibatches = 2
epochs = 2
lr = 3e-4

[aux]
objective = "fd"
horizon = 2
memory_rollouts = 2
decoder_hidden = [16]
forward_hidden = [16]
projector_hidden = [16]

[eval]
every_updates = 2
envs = 2
episodes = 2
)";

RunConfig small_config() { return parse_config(kSmallConfig, "small"); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("roto_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Row values except wall time, with NaN mapped to a sentinel so rows compare with ==.
std::vector<double> comparable(const MetricsRow& row) {
  std::vector<double> v = row.values;
  v[2] = 0.0;
  for (double& x : v) {
    if (std::isnan(x)) x = -12345.0;
  }
  return v;
}

bool same_tensors(const roto::agent::Agent& a, const roto::agent::Agent& b) {
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (size_t i = 0; i < ta.size(); ++i) {
    if (*ta[i] != *tb[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config renders canonically and round trips") {
  const RunConfig c = small_config();
  const RunConfig back = parse_config(to_toml(c));
  CHECK(to_toml(back) == to_toml(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(c.agent.obs_dim == 2 * (9 + 5));
  CHECK(c.agent.action_dim == 3);
  CHECK(c.env.seed == 7);
  CHECK(c.steps_per_update() == 32);
  CHECK(c.total_updates() == 8);

  RunConfig renamed = c;
  renamed.name = "other";
  renamed.out_dir = "/elsewhere";
  renamed.total_steps = 999999;
  CHECK(config_hash(renamed) == config_hash(c));
  RunConfig changed = c;
  changed.ppo.lr = 1e-4;
  CHECK(config_hash(changed) != config_hash(c));
  CHECK(hash_hex(0xabcull) == "0000000000000abc");
}

TEST_CASE("config errors are reported as ConfigError") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[ppo]\nlearning_rate = 1e-3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nid = \"pong\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[ppo]\nminibatches = 3\n"), ConfigError);  // 64 * 32 not divisible by 3
  CHECK_THROWS_AS(parse_config("[env]\nuse_tactile = false\n[aux]\nobjective = \"tr\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[ppo]\nlr = \"fast\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = \n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), ConfigError);
  CHECK_NOTHROW(parse_config("[env]\nuse_tactile = false\n[aux]\nobjective = \"fd\"\n"));
}

TEST_CASE("sweep range validation") {
  RunConfig c = small_config();
  c.ppo.rollout_length = 16;
  c.ppo.minibatches = 4;
  c.ppo.epochs = 4;
  c.ppo.lr = 1e-4;
  c.aux.horizon = 3;
  c.aux.lr_aux = 1e-4;
  c.aux.c_aux = 1.0;
  CHECK_NOTHROW(validate_sweep_ranges(c));
  RunConfig bad = c;
  bad.ppo.lr = 2e-3;
  CHECK_THROWS_AS(validate_sweep_ranges(bad), ConfigError);
  bad = c;
  bad.aux.horizon = 4;
  CHECK_THROWS_AS(validate_sweep_ranges(bad), ConfigError);
  bad = c;
  bad.ppo.epochs = 5;
  CHECK_THROWS_AS(validate_sweep_ranges(bad), ConfigError);
}

TEST_CASE("the seven experiments of each environment are config fixtures") {
  const std::vector<std::string> envs = {"find2d", "bounce2d", "orbit2d"};
  const std::vector<std::string> exps = {"rl_prop", "rl_prop_tact", "tr", "fr", "fd", "tfd", "fd_memory"};
  for (const auto& e : envs) {
    for (const auto& x : exps) {
      const std::string path = std::string(ROTO_SOURCE_DIR) + "/configs/" + e + "_" + x + ".toml";
      CAPTURE(path);
      RunConfig c;
      REQUIRE_NOTHROW(c = load_config(path));
      CHECK(roto::envs::to_string(c.env.env_id) == e);
      CHECK_NOTHROW(validate_sweep_ranges(c));
      CHECK(c.env.use_tactile == (x != "rl_prop"));
      const std::string obj = x == "rl_prop" || x == "rl_prop_tact" ? "none" : (x == "fd_memory" ? "fd" : x);
      CHECK(roto::ssl::to_string(c.aux.objective) == obj);
      CHECK((c.aux.memory_rollouts > 1) == (x == "fd_memory"));
    }
  }
  const RunConfig b = load_config(std::string(ROTO_SOURCE_DIR) + "/configs/bounce2d_fd.toml");
  CHECK(b.ppo.rollout_length == 32);
  CHECK(b.ppo.minibatches == 64);
  CHECK(b.ppo.epochs == 4);
  CHECK(b.ppo.lr == 1.5e-4);
  CHECK(b.aux.c_aux == 0.8462);
  CHECK(b.aux.horizon == 9);
}

TEST_CASE("metrics CSV: header once, lossless rows, increasing step") {
  const fs::path dir = scratch("metrics");
  const std::string path = (dir / "m.csv").string();
  const std::vector<std::string> cols = {"step", "a", "b"};
  std::vector<std::vector<double>> rows = {
      {1, 0.1, std::nan("")}, {2, -1e-300, 1.0 / 3.0}, {5, 123456789.123456789, -0.0}};
  {
    MetricsLog log(path, cols);
    log.append({rows[0]});
    log.append({rows[1]});
  }
  {
    MetricsLog log(path, cols);  // reopen: header kept, step continues
    CHECK_THROWS_AS(log.append({{2, 0, 0}}), std::logic_error);
    log.append({rows[2]});
    CHECK_THROWS_AS(log.append({{6, 0}}), std::invalid_argument);
  }
  CHECK_THROWS(MetricsLog(path, {"step", "other"}));
  const std::string text = read_file(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.rfind("step,a,b\n", 0) == 0);
  const MetricsTable t = read_metrics(path);
  CHECK(t.columns == cols);
  REQUIRE(t.rows.size() == 3);
  for (size_t r = 0; r < 3; ++r) {
    for (size_t c = 0; c < 3; ++c) {
      if (std::isnan(rows[r][c])) {
        CHECK(std::isnan(t.rows[r][c]));
      } else {
        CHECK(t.rows[r][c] == rows[r][c]);
      }
    }
  }
  CHECK(std::signbit(t.rows[2][2]));
  CHECK(t.column("b") == 2);
  CHECK(t.column("zzz") == -1);
  truncate_metrics(path, 2.0);
  CHECK(read_metrics(path).rows.size() == 2);
}

TEST_CASE("untrained bounce agent gets only passive bounces and evaluation is deterministic") {
  RunConfig c = small_config();
  Trainer tr(c);
  const EvalReport a = evaluate(tr.agent(), c.env, 3, 5, 11);
  const EvalReport b = evaluate(tr.agent(), c.env, 3, 5, 11);
  CHECK(a.episodes == 5);
  CHECK(a.returns == b.returns);
  CHECK(a.physical == b.physical);
  // A still paddle lets the dropped ball bounce passively until the contact
  // gap falls under 5 steps: at most 6 counted bounces at restitution 0.8.
  CHECK(a.physical_max <= 6.0);
  CHECK(a.term_names == std::vector<std::string>{"air", "bounce", "fall"});
  for (int len : a.lengths) CHECK((len >= 1 && len <= c.env.episode_length));
  CHECK(std::isnan(a.time_to_find[0]));
}

TEST_CASE("find evaluation reports time to find and per-step distance reward") {
  RunConfig c = small_config();
  c.env = roto::envs::EnvConfig::defaults(roto::envs::EnvId::kFind2d);
  c.env.batch = 4;
  c.env.episode_length = 50;
  c.aux.objective = roto::ssl::Objective::kNone;
  Trainer tr(c);
  const EvalReport r = evaluate(tr.agent(), c.env, 2, 4, 3);
  REQUIRE(r.physical.size() == 4);
  double sum = 0.0;
  for (size_t i = 0; i < 4; ++i) {
    CHECK((r.physical[i] >= 0.0 && r.physical[i] <= 1.0));
    sum += r.physical[i] * r.lengths[i];
  }
  // Per-step r_dist times length is the episode's dist term, averaged in term_means.
  CHECK(sum / 4 == doctest::Approx(r.term_means[0]).epsilon(1e-12));
  for (size_t k = 0; k < 3; ++k) CHECK((r.found_fraction[k] >= 0.0 && r.found_fraction[k] <= 1.0));
  CHECK(r.found_fraction[0] >= r.found_fraction[1]);
  CHECK(r.found_fraction[1] >= r.found_fraction[2]);
}

TEST_CASE("serial runs are reproducible per seed") {
  const RunConfig c = small_config();
  Trainer a(c), b(c);
  for (int i = 0; i < 3; ++i) CHECK(comparable(a.iterate()) == comparable(b.iterate()));
  CHECK(same_tensors(a.agent(), b.agent()));
  RunConfig other = c;
  other.seed = 8;
  other.finalize();
  Trainer d(other);
  d.iterate();
  CHECK_FALSE(same_tensors(a.agent(), d.agent()));
}

TEST_CASE("evaluation leaves training state untouched and eval envs add no steps") {
  const RunConfig c = small_config();
  Trainer t(c);
  t.iterate();
  const fs::path dir = scratch("evalmut");
  t.save_checkpoint((dir / "before").string());
  const EvalReport r = t.evaluate_now();
  CHECK(r.episodes == c.eval.episodes);
  t.save_checkpoint((dir / "after").string());
  CHECK(read_file(dir / "before.bin") == read_file(dir / "after.bin"));
  CHECK(read_file(dir / "before.json") == read_file(dir / "after.json"));
  t.iterate();  // update 2 runs an evaluation
  CHECK(t.env().total_steps() == t.global_step());
  CHECK(t.global_step() == 2 * c.steps_per_update());
}

TEST_CASE("objective none is the RL-only baseline") {
  RunConfig c = small_config();
  c.aux.objective = roto::ssl::Objective::kNone;
  c.finalize();
  Trainer t(c);
  const MetricsRow row = t.iterate();
  const auto& cols = t.columns();
  const auto idx = std::find(cols.begin(), cols.end(), "aux_loss") - cols.begin();
  CHECK(std::isnan(row.values[static_cast<size_t>(idx)]));
  CHECK(t.memory().stored() == 0);
}

TEST_CASE("checkpoint save, load, save is byte identical") {
  const RunConfig c = small_config();
  Trainer a(c);
  a.iterate();
  a.iterate();
  const fs::path dir = scratch("ckpt");
  a.save_checkpoint((dir / "one").string());
  Trainer b(c);
  b.load_checkpoint((dir / "one").string());
  b.save_checkpoint((dir / "two").string());
  CHECK(read_file(dir / "one.bin") == read_file(dir / "two.bin"));
  CHECK(read_file(dir / "one.json") == read_file(dir / "two.json"));
  CHECK(b.memory().stored() == 2);
}

TEST_CASE("resumed training bisimulates the uninterrupted run") {
  const RunConfig c = small_config();
  Trainer full(c);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 4; ++i) rows.push_back(comparable(full.iterate()));

  Trainer first(c);
  first.iterate();
  first.iterate();
  const fs::path dir = scratch("resume");
  first.save_checkpoint((dir / "mid").string());
  Trainer resumed(c);
  resumed.load_checkpoint((dir / "mid").string());
  CHECK(comparable(resumed.iterate()) == rows[2]);
  CHECK(comparable(resumed.iterate()) == rows[3]);
  CHECK(same_tensors(resumed.agent(), full.agent()));
}

TEST_CASE("checkpoint with a different config hash is rejected") {
  const RunConfig c = small_config();
  Trainer a(c);
  const fs::path dir = scratch("hash");
  a.save_checkpoint((dir / "c").string());
  RunConfig other = c;
  other.ppo.lr = 1e-4;
  other.finalize();
  Trainer b(other);
  try {
    b.load_checkpoint((dir / "c").string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("does not match") != std::string::npos);
  }
  CHECK_THROWS(b.load_checkpoint((dir / "missing").string()));
}

TEST_CASE("run writes the run directory and resumes where it stopped") {
  RunConfig c = small_config();
  const fs::path full_dir = scratch("run_full");
  c.out_dir = full_dir.string();
  c.checkpoint_every_updates = 1;
  Trainer(c).run();
  for (const char* f : {"config.toml", "manifest.json", "metrics.csv", "checkpoints/latest.json",
                        "checkpoints/latest.bin"}) {
    CHECK(fs::exists(full_dir / f));
  }
  const MetricsTable full = read_metrics((full_dir / "metrics.csv").string());
  REQUIRE(full.rows.size() == 8);
  for (size_t i = 1; i < full.rows.size(); ++i) CHECK(full.rows[i][0] > full.rows[i - 1][0]);
  CHECK(full.rows.back()[0] == 256);
  CHECK(read_file(full_dir / "manifest.json").find("\"finished\"") != std::string::npos);
  CHECK(parse_config(read_file(full_dir / "config.toml")).name == "small");

  RunConfig half = c;
  const fs::path part_dir = scratch("run_part");
  half.out_dir = part_dir.string();
  half.total_steps = 128;
  Trainer(half).run();
  RunConfig rest = half;
  rest.total_steps = 256;  // same hash: the budget does not enter it
  Trainer(rest).run();
  const MetricsTable resumed = read_metrics((part_dir / "metrics.csv").string());
  REQUIRE(resumed.rows.size() == full.rows.size());
  for (size_t r = 0; r < full.rows.size(); ++r) {
    for (size_t k = 0; k < full.columns.size(); ++k) {
      if (k == 2) continue;  // wall time
      const double x = full.rows[r][k], y = resumed.rows[r][k];
      CAPTURE(r);
      CAPTURE(full.columns[k]);
      CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
    }
  }
}

TEST_CASE("a non-finite loss writes an abort checkpoint and stops") {
  RunConfig c = small_config();
  c.ppo.lr = 1e300;
  const fs::path dir = scratch("abort");
  c.out_dir = dir.string();
  c.finalize();
  Trainer t(c);
  CHECK_THROWS_AS(t.run(), TrainingAborted);
  CHECK(checkpoint_exists((dir / "checkpoints" / "abort").string()));
  CHECK(read_file(dir / "manifest.json").find("\"aborted\"") != std::string::npos);
}

TEST_CASE("load_agent restores trained weights from a checkpoint") {
  const RunConfig c = small_config();
  Trainer t(c);
  t.iterate();
  const fs::path dir = scratch("load_agent");
  t.save_checkpoint((dir / "ck").string());
  const LoadedAgent la = load_agent((dir / "ck").string());
  CHECK(same_tensors(la.agent, t.agent()));
  CHECK(to_toml(la.config) == to_toml(t.config()));
  CHECK_THROWS_AS(load_agent((dir / "nothing").string()), ConfigError);
}

TEST_CASE("TPE finds the optimum of a 1-D quadratic") {
  // Top 10% of [-10, 10] around the optimum x = 3 is |x - 3| <= 1.
  const SearchSpace space = {SearchParam::uniform("x", -10.0, 10.0)};
  std::vector<double> best_dist;
  for (uint64_t seed : {1, 2, 3}) {
    const auto trials = optimize(space, TpeOptions{}, 20, seed, [](const Point& p, int) {
      return -(p[0] - 3.0) * (p[0] - 3.0);
    });
    double best = -1e300, arg = 0.0;
    for (const Trial& t : trials) {
      CHECK(space[0].contains(t.x[0]));
      if (t.objective > best) {
        best = t.objective;
        arg = t.x[0];
      }
    }
    best_dist.push_back(std::abs(arg - 3.0));
  }
  std::sort(best_dist.begin(), best_dist.end());
  CHECK(best_dist[1] <= 1.0);
}

TEST_CASE("TPE beats random search on a quadratic in log space") {
  const SearchSpace space = {SearchParam::log_uniform("lr", 1e-5, 1e-3),
                             SearchParam::categorical("mb", {4, 8, 16, 32, 64})};
  auto f = [](const Point& p, int) {
    const double d = std::log10(p[0]) + 4.0;
    return -d * d - (p[1] == 16 ? 0.0 : 0.5);
  };
  double tpe_sum = 0.0, rnd_sum = 0.0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto best = [](const std::vector<Trial>& ts) {
      double b = -1e300;
      for (const Trial& t : ts) b = std::max(b, t.objective);
      return b;
    };
    tpe_sum += best(optimize(space, TpeOptions{}, 20, seed, f));
    TpeOptions r;
    r.random_only = true;
    rnd_sum += best(optimize(space, r, 20, seed, f));
  }
  CHECK(tpe_sum > rnd_sum);
}

TEST_CASE("startup trials are uniform over the space") {
  // Chi-square over 10 equal-width bins (of log x for the log-uniform
  // parameter) and over the 5 categories; 5 startup draws x 400 repeats.
  const SearchSpace space = {SearchParam::uniform("u", -2.0, 3.0), SearchParam::log_uniform("l", 1e-5, 1e-3),
                             SearchParam::categorical("c", {4, 8, 16, 32, 64})};
  std::vector<double> bins_u(10, 0), bins_l(10, 0), bins_c(5, 0);
  int n = 0;
  for (uint64_t rep = 0; rep < 400; ++rep) {
    const auto trials = optimize(space, TpeOptions{}, 5, rep, [](const Point& p, int) { return p[0]; });
    for (const Trial& t : trials) {
      bins_u[static_cast<size_t>(std::min(9.0, (t.x[0] + 2.0) / 0.5))] += 1;
      bins_l[static_cast<size_t>(std::min(9.0, (std::log10(t.x[1]) + 5.0) / 0.2))] += 1;
      const auto& ch = space[2].choices;
      bins_c[static_cast<size_t>(std::find(ch.begin(), ch.end(), t.x[2]) - ch.begin())] += 1;
      ++n;
    }
  }
  auto chi2 = [n](const std::vector<double>& bins) {
    const double e = static_cast<double>(n) / static_cast<double>(bins.size());
    double s = 0.0;
    for (double o : bins) s += (o - e) * (o - e) / e;
    return s;
  };
  // 99.9% quantiles: 27.88 (9 dof), 18.47 (4 dof).
  CHECK(chi2(bins_u) < 27.88);
  CHECK(chi2(bins_l) < 27.88);
  CHECK(chi2(bins_c) < 18.47);
}

TEST_CASE("failed trials are recorded and do not stop the sweep") {
  const SearchSpace space = {SearchParam::uniform("x", 0.0, 1.0)};
  const auto trials = optimize(space, TpeOptions{}, 10, 4, [](const Point& p, int i) {
    if (i == 2) throw roto::numerics::NumericError("policy NaN");
    if (i == 6) return std::nan("");
    return p[0];
  });
  REQUIRE(trials.size() == 10);
  CHECK(trials[2].failed);
  CHECK(trials[2].error == "policy NaN");
  CHECK(trials[6].failed);
  CHECK_FALSE(trials[7].failed);
  CHECK_THROWS_AS(optimize(space, TpeOptions{}, 3, 0, [](const Point&, int) { return 0.0; }),
                  std::invalid_argument);
}

TEST_CASE("sweep space follows the experiment") {
  RunConfig c = small_config();
  CHECK(sweep_space(c).size() == 5 + 2 + 1 + 1);
  c.aux.memory_rollouts = 1;
  CHECK(sweep_space(c).size() == 8);
  c.aux.objective = roto::ssl::Objective::kTR;
  CHECK(sweep_space(c).size() == 7);
  c.aux.objective = roto::ssl::Objective::kNone;
  const SearchSpace s = sweep_space(c);
  REQUIRE(s.size() == 5);
  const RunConfig applied = apply_point(c, s, {64, 16, 8, 2e-4, 0.05});
  CHECK(applied.ppo.rollout_length == 64);
  CHECK(applied.ppo.minibatches == 16);
  CHECK(applied.ppo.epochs == 8);
  CHECK(applied.ppo.lr == 2e-4);
  CHECK(applied.ppo.c_entropy == 0.05);
}

TEST_CASE("final-window objective averages evaluations in the last tenth") {
  MetricsTable t;
  t.columns = {"step", "eval_return_mean"};
  const double nan = std::nan("");
  t.rows = {{100, 1.0}, {500, 2.0}, {900, nan}, {950, 4.0}, {1000, 6.0}};
  CHECK(final_window_objective(t, 0.1) == 5.0);
  CHECK(final_window_objective(t, 0.5) == 4.0);
  t.rows = {{100, 1.0}, {1000, nan}};
  CHECK_THROWS(final_window_objective(t, 0.1));
}

TEST_CASE("run_sweep persists the trials table and isolates failures") {
  RunConfig base = small_config();
  base.aux.objective = roto::ssl::Objective::kNone;
  const fs::path dir = scratch("sweep");
  base.out_dir = dir.string();
  SweepOptions opts;
  opts.trials = 8;
  opts.startup = 3;
  opts.seed = 5;
  int calls = 0;
  const SweepResult r = run_sweep(base, opts, [&](const RunConfig& cfg, int i) {
    ++calls;
    CHECK(cfg.out_dir == (dir / ("trial_" + std::to_string(i))).string());
    if (i == 1) throw roto::numerics::NumericError("value NaN");
    return -std::abs(std::log10(cfg.ppo.lr) + 4.0);
  });
  CHECK(calls == 8);
  CHECK(r.trials[1].failed);
  REQUIRE(r.best >= 0);
  CHECK(r.best_config.ppo.lr == r.trials[static_cast<size_t>(r.best)].x[3]);
  CHECK(fs::exists(dir / "trials.json"));
  CHECK(fs::exists(dir / "best.toml"));
  const std::string csv = read_file(dir / "trials.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("value NaN") != std::string::npos);

  const fs::path dir2 = scratch("sweep_fail");
  base.out_dir = dir2.string();
  CHECK_THROWS_AS(run_sweep(base, opts, [](const RunConfig&, int) -> double { throw std::runtime_error("x"); }),
                  std::runtime_error);
  CHECK(fs::exists(dir2 / "trials.json"));
}

TEST_CASE("marginal MI ranks the embedded feature first") {
  Rng rng(3);
  roto::analysis::SampleSet set;
  const int n = 1500;
  set.s.resize(n, 3);
  set.z.resize(n, 6);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) set.s(i, j) = rng.normal();
    for (int j = 0; j < 6; ++j) set.z(i, j) = 0.3 * rng.normal();
    set.z(i, 0) += set.s(i, 1);
    set.z(i, 3) -= 0.5 * set.s(i, 1);
  }
  MiOptions o;
  o.pca = 4;
  const MiReport r = mi_from_samples(set, {"a", "b", "c"}, o);
  CHECK(r.ranking[0] == 1);
  CHECK(std::isfinite(r.mi_joint));
  CHECK(r.mi_marginal[1] > 0.5);
  CHECK(std::abs(r.mi_marginal[0]) < 0.1);
  const auto j = to_json(r);
  CHECK(j["ranking"][0] == "b");
  CHECK(j["pca_components"] == 4);
}

TEST_CASE("tactile-pred report sums logged confusion counts") {
  const fs::path dir = scratch("tactile");
  {
    MetricsLog log((dir / "metrics.csv").string(), {"step", "aux_tp", "aux_fp", "aux_tn", "aux_fn"});
    log.append({{1, 3, 1, 10, 2}});
    log.append({{2, std::nan(""), std::nan(""), std::nan(""), std::nan("")}});
    log.append({{3, 5, 0, 12, 1}});
  }
  const TactilePredReport r = analyze_tactile_pred(dir.string());
  CHECK(r.rows == 2);
  CHECK(r.total.tp == 8);
  CHECK(r.total.fp == 1);
  CHECK(r.total.tn == 22);
  CHECK(r.total.fn == 3);
  CHECK(r.last.tp == 5);
  CHECK(r.total_metrics.tpr == doctest::Approx(8.0 / 11.0));
  CHECK(r.last_metrics.fpr == 0.0);
}
