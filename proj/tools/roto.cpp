#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "roto/analysis/latents.hpp"
#include "roto/harness/analyze.hpp"
#include "roto/harness/checkpoint.hpp"
#include "roto/harness/evaluation.hpp"
#include "roto/harness/sweep.hpp"
#include "roto/harness/trainer.hpp"

namespace {

using namespace roto::harness;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

nlohmann::ordered_json num(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

void emit(const nlohmann::ordered_json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
  std::cerr << "wrote " << path << '\n';
}

nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["env"] = roto::envs::to_string(r.env_id);
  j["episodes"] = r.episodes;
  j["return_mean"] = r.return_mean;
  j["return_std"] = r.return_std;
  auto& terms = j["term_means"] = nlohmann::ordered_json::object();
  for (size_t i = 0; i < r.term_names.size(); ++i) terms[r.term_names[i]] = r.term_means[i];
  const std::string phys = physical_metric_name(r.env_id);
  j[phys] = {{"mean", r.physical_mean}, {"max", r.physical_max}, {"median", r.physical_median}};
  if (r.env_id == roto::envs::EnvId::kFind2d) {
    auto& ttf = j["time_to_find"] = nlohmann::ordered_json::object();
    for (size_t k = 0; k < kFindTolerances.size(); ++k) {
      ttf[std::to_string(kFindTolerances[k])] = {{"mean_steps", num(r.time_to_find[k])},
                                                 {"found_fraction", r.found_fraction[k]}};
    }
  }
  j["returns"] = r.returns;
  j["per_episode_" + phys] = r.physical;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile RL training, evaluation, sweeps and representation analysis"};
  app.require_subcommand(1);

  std::string config_path, out_dir, ckpt, run_dir, report_path;
  int64_t seed = -1, steps = -1;
  int episodes = 16, eval_envs = 16, trials = 20, startup = 5, samples = 5000, pca = 13, k = 4;
  bool random_search = false;

  auto* train = app.add_subcommand("train", "Train one run to its step budget (resumes if possible)");
  train->add_option("--config", config_path, "Run configuration (TOML)")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "Override the seed");
  train->add_option("--out", out_dir, "Run directory");
  train->add_option("--steps", steps, "Override total environment steps");

  auto* eval = app.add_subcommand("eval", "Deterministic evaluation of a checkpoint");
  eval->add_option("--ckpt", ckpt, "Checkpoint path (without .json/.bin)")->required();
  eval->add_option("--episodes", episodes, "Episodes")->check(CLI::PositiveNumber);
  eval->add_option("--envs", eval_envs, "Parallel evaluation environments")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "Evaluation seed");
  eval->add_option("--report", report_path, "Write the JSON report here instead of stdout");

  auto* sweep = app.add_subcommand("sweep", "Hyperparameter sweep over the tunable ranges");
  sweep->add_option("--config", config_path, "Base run configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--trials", trials, "Trials")->check(CLI::PositiveNumber);
  sweep->add_option("--startup", startup, "Uniform random startup trials")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Sweep directory");
  sweep->add_option("--seed", seed, "Sampler seed");
  sweep->add_flag("--random", random_search, "Random search instead of TPE");

  auto* analyze = app.add_subcommand("analyze", "Representation analyses");
  analyze->require_subcommand(1);
  auto* mi = analyze->add_subcommand("mi", "KSG mutual information between latents and ground truth");
  auto* mi_src = mi->add_option_group("source");
  mi_src->add_option("--run", run_dir, "Run directory (uses checkpoints/latest)");
  mi_src->add_option("--ckpt", ckpt, "Checkpoint path");
  mi_src->require_option(1);
  mi->add_option("--samples", samples, "Samples")->check(CLI::PositiveNumber);
  mi->add_option("--pca", pca, "PCA components")->check(CLI::PositiveNumber);
  mi->add_option("--k", k, "Neighbours")->check(CLI::PositiveNumber);
  mi->add_option("--seed", seed, "Collection seed");
  mi->add_option("--report", report_path, "Write the JSON report here instead of stdout");
  auto* latents = analyze->add_subcommand("latents", "Per-step latents of deterministic episodes (JSON lines)");
  latents->add_option("--ckpt", ckpt, "Checkpoint path")->required();
  latents->add_option("--episodes", episodes, "Episodes")->check(CLI::PositiveNumber);
  latents->add_option("--seed", seed, "Environment seed");
  latents->add_option("--out", report_path, "Output file (default stdout)");
  auto* tact = analyze->add_subcommand("tactile-pred", "Contact-prediction quality from a run's metrics");
  tact->add_option("--run", run_dir, "Run directory")->required();
  tact->add_option("--report", report_path, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) {
      RunConfig cfg = load_config(config_path);
      if (seed >= 0) {
        cfg.seed = static_cast<uint64_t>(seed);
        cfg.env.seed = cfg.seed;
      }
      if (steps > 0) cfg.total_steps = steps;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (cfg.out_dir.empty()) throw ConfigError("no output directory: pass --out or set out_dir");
      cfg.finalize();
      Trainer trainer(cfg);
      std::cerr << "training " << cfg.name << " (" << hash_hex(config_hash(cfg)) << ") for " << cfg.total_steps
                << " steps into " << cfg.out_dir << '\n';
      trainer.run();
      std::cerr << "finished at step " << trainer.global_step() << '\n';
    } else if (*eval) {
      const LoadedAgent la = load_agent(ckpt);
      const uint64_t s = seed >= 0 ? static_cast<uint64_t>(seed) : roto::numerics::mix_seed(la.config.seed, 1000003);
      emit(report_json(evaluate(la.agent, la.config.env, eval_envs, episodes, s)), report_path);
    } else if (*sweep) {
      RunConfig base = load_config(config_path);
      if (!out_dir.empty()) base.out_dir = out_dir;
      if (base.out_dir.empty()) throw ConfigError("no output directory: pass --out or set out_dir");
      SweepOptions opts;
      opts.trials = trials;
      opts.startup = startup;
      opts.random_search = random_search;
      opts.seed = seed >= 0 ? static_cast<uint64_t>(seed) : base.seed;
      const SweepResult r = run_sweep(base, opts, training_runner(opts.final_fraction));
      const Trial& best = r.trials[static_cast<size_t>(r.best)];
      std::cerr << "best trial " << best.id << " objective " << best.objective << "; table in " << base.out_dir
                << '\n';
    } else if (*mi) {
      const LoadedAgent la = load_agent(ckpt.empty() ? latest_checkpoint(run_dir) : ckpt);
      MiOptions o;
      o.samples = samples;
      o.pca = pca;
      o.k = k;
      o.seed = seed >= 0 ? static_cast<uint64_t>(seed) : la.config.seed;
      emit(to_json(analyze_mi(la.agent, la.config.env, o)), report_path);
    } else if (*latents) {
      const LoadedAgent la = load_agent(ckpt);
      roto::envs::EnvConfig env = la.config.env;
      if (seed >= 0) env.seed = static_cast<uint64_t>(seed);
      const roto::analysis::LatentTrajectory traj = roto::analysis::rollout_latents(la.agent, env, episodes);
      if (report_path.empty()) {
        roto::analysis::write_latents_jsonl(traj, std::cout);
      } else {
        std::ofstream out(report_path);
        roto::analysis::write_latents_jsonl(traj, out);
        if (!out) throw std::runtime_error("cannot write " + report_path);
      }
    } else if (*tact) {
      emit(to_json(analyze_tactile_pred(run_dir)), report_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TrainingAborted& e) {
    std::cerr << "numeric abort: " << e.what() << " (checkpoint " << e.checkpoint() << ")\n";
    return kExitNumeric;
  } catch (const roto::numerics::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
