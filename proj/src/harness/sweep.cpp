#include "roto/harness/sweep.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "roto/harness/trainer.hpp"

namespace roto::harness {

namespace fs = std::filesystem;

SearchSpace sweep_space(const RunConfig& base) {
  SearchSpace s = {
      SearchParam::categorical("ppo.rollout_length", {16, 32, 64}),
      SearchParam::categorical("ppo.minibatches", {4, 8, 16, 32, 64}),
      SearchParam::categorical("ppo.epochs", {4, 8, 16, 32}),
      SearchParam::log_uniform("ppo.lr", 1e-5, 1e-3),
      SearchParam::categorical("ppo.c_entropy", {0.0, 0.05, 0.1}),
  };
  if (base.aux.enabled()) {
    s.push_back(SearchParam::log_uniform("aux.lr_aux", 1e-5, 1e-3));
    s.push_back(SearchParam::log_uniform("aux.c_aux", 1e-3, 10.0));
    if (base.aux.uses_sequences()) s.push_back(SearchParam::categorical("aux.horizon", {1, 2, 3, 9}));
    if (base.aux.memory_rollouts > 1) s.push_back(SearchParam::categorical("aux.memory_rollouts", {2, 3, 4}));
  }
  return s;
}

RunConfig apply_point(const RunConfig& base, const SearchSpace& space, const Point& x) {
  if (x.size() != space.size()) throw std::invalid_argument("apply_point: point size mismatch");
  RunConfig c = base;
  for (size_t i = 0; i < space.size(); ++i) {
    const std::string& n = space[i].name;
    const double v = x[i];
    if (n == "ppo.rollout_length") c.ppo.rollout_length = static_cast<int>(v);
    else if (n == "ppo.minibatches") c.ppo.minibatches = static_cast<int>(v);
    else if (n == "ppo.epochs") c.ppo.epochs = static_cast<int>(v);
    else if (n == "ppo.lr") c.ppo.lr = v;
    else if (n == "ppo.c_entropy") c.ppo.c_entropy = v;
    else if (n == "aux.lr_aux") c.aux.lr_aux = v;
    else if (n == "aux.c_aux") c.aux.c_aux = v;
    else if (n == "aux.horizon") c.aux.horizon = static_cast<int>(v);
    else if (n == "aux.memory_rollouts") c.aux.memory_rollouts = static_cast<int>(v);
    else throw std::invalid_argument("apply_point: unknown parameter " + n);
  }
  return c;
}

double final_window_objective(const MetricsTable& t, double fraction) {
  const int step = t.column("step");
  const int ret = t.column("eval_return_mean");
  if (step < 0 || ret < 0 || t.rows.empty()) throw std::runtime_error("objective: metrics lack step/eval columns");
  const double last = t.rows.back()[static_cast<size_t>(step)];
  const double from = (1.0 - fraction) * last;
  double sum = 0.0;
  int n = 0;
  for (const auto& row : t.rows) {
    const double v = row[static_cast<size_t>(ret)];
    if (row[static_cast<size_t>(step)] >= from && !std::isnan(v)) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) throw std::runtime_error("objective: no evaluation in the final window");
  return sum / n;
}

TrialRunner training_runner(double final_fraction) {
  return [final_fraction](const RunConfig& cfg, int) {
    Trainer trainer(cfg);
    trainer.run();
    return final_window_objective(read_metrics((fs::path(cfg.out_dir) / "metrics.csv").string()), final_fraction);
  };
}

SweepResult run_sweep(const RunConfig& base, const SweepOptions& opts, const TrialRunner& runner) {
  if (base.out_dir.empty()) throw ConfigError("sweep: out_dir is not set");
  if (opts.trials < opts.startup) throw ConfigError("sweep: trials must be >= startup trials");
  SweepResult result;
  result.space = sweep_space(base);
  const TpeOptions tpe{opts.startup, opts.gamma, opts.candidates, opts.random_search};
  fs::create_directories(base.out_dir);
  result.trials = optimize(result.space, tpe, opts.trials, opts.seed, [&](const Point& x, int i) {
    RunConfig c = apply_point(base, result.space, x);
    c.name = base.name + "_trial_" + std::to_string(i);
    c.out_dir = (fs::path(base.out_dir) / ("trial_" + std::to_string(i))).string();
    c.finalize();
    validate_sweep_ranges(c);
    return runner(c, i);
  });
  double best = -std::numeric_limits<double>::infinity();
  for (const Trial& t : result.trials) {
    if (!t.failed && t.objective > best) {
      best = t.objective;
      result.best = t.id;
    }
  }
  if (result.best >= 0) {
    result.best_config = apply_point(base, result.space, result.trials[static_cast<size_t>(result.best)].x);
  }
  write_trials(base.out_dir, result, opts);
  if (result.best < 0) throw std::runtime_error("sweep: no successful trials");
  return result;
}

void write_trials(const std::string& dir, const SweepResult& r, const SweepOptions& opts) {
  nlohmann::ordered_json j;
  j["sampler"] = opts.random_search ? "random" : "tpe";
  j["trials_requested"] = opts.trials;
  j["startup"] = opts.startup;
  j["gamma"] = opts.gamma;
  j["candidates"] = opts.candidates;
  j["objective"] = "mean eval_return_mean over the final " + std::to_string(opts.final_fraction) + " of steps";
  j["best"] = r.best;
  auto& arr = j["trials"] = nlohmann::ordered_json::array();
  std::ofstream csv(fs::path(dir) / "trials.csv");
  csv << "trial,failed,objective";
  for (const auto& p : r.space) csv << ',' << p.name;
  csv << ",error\n";
  for (const Trial& t : r.trials) {
    nlohmann::ordered_json e;
    e["trial"] = t.id;
    e["failed"] = t.failed;
    e["objective"] = t.failed ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.objective);
    for (size_t i = 0; i < r.space.size(); ++i) e["params"][r.space[i].name] = t.x[i];
    if (t.failed) e["error"] = t.error;
    arr.push_back(e);
    csv << t.id << ',' << (t.failed ? 1 : 0) << ',' << format_value(t.objective);
    for (double v : t.x) csv << ',' << format_value(v);
    std::string err = t.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ' ';
    }
    csv << ',' << err << '\n';
  }
  std::ofstream(fs::path(dir) / "trials.json") << j.dump(2) << '\n';
  if (r.best >= 0) std::ofstream(fs::path(dir) / "best.toml") << to_toml(r.best_config);
}

}  // namespace roto::harness
