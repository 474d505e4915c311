#include "roto/harness/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "roto/harness/checkpoint.hpp"

namespace roto::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

agent::Agent make_agent(const RunConfig& cfg) {
  numerics::Rng rng(numerics::mix_seed(cfg.seed, 2));
  return agent::Agent(cfg.agent, rng);
}

const char* kTolNames[3] = {"3cm", "1cm", "0p05cm"};

}  // namespace

std::vector<std::string> metric_columns(const envs::EnvSpec& spec) {
  std::vector<std::string> c = {"step", "update", "wall_time", "train_return", "train_episodes"};
  for (const auto& t : spec.reward_terms) c.push_back("train_" + t);
  for (const char* n : {"policy_loss", "value_loss", "entropy_loss", "clip_fraction", "approx_kl", "grad_norm",
                        "aux_loss", "aux_reconstruction", "aux_prop_mse", "aux_dynamics", "aux_tactile_forecast",
                        "aux_grad_norm", "aux_tp", "aux_fp", "aux_tn", "aux_fn", "eval_return_mean",
                        "eval_return_std"}) {
    c.emplace_back(n);
  }
  for (const auto& t : spec.reward_terms) c.push_back("eval_" + t);
  const std::string phys = physical_metric_name(spec.id);
  c.push_back("eval_" + phys + "_mean");
  c.push_back("eval_" + phys + "_max");
  c.push_back("eval_" + phys + "_median");
  if (spec.id == envs::EnvId::kFind2d) {
    for (const char* n : kTolNames) c.push_back(std::string("eval_ttf_") + n);
    for (const char* n : kTolNames) c.push_back(std::string("eval_found_") + n);
  }
  return c;
}

Trainer::Trainer(RunConfig cfg)
    : cfg_((cfg.finalize(), std::move(cfg))),
      env_(cfg_.env),
      agent_(make_agent(cfg_)),
      ppo_(agent_, cfg_.ppo, numerics::mix_seed(cfg_.seed, 3)),
      memory_(cfg_.aux.memory_rollouts),
      rng_(numerics::mix_seed(cfg_.seed, 1)),
      episode_return_(static_cast<size_t>(cfg_.env.batch), 0.0) {
  if (cfg_.aux.enabled()) {
    aux_ = std::make_unique<ssl::AuxLearner>(agent_, cfg_.aux, ssl::ObsLayout::from_spec(env_.spec()),
                                             numerics::mix_seed(cfg_.seed, 4));
  }
  columns_ = metric_columns(env_.spec());
}

bool Trainer::eval_due() const {
  return updates_ % cfg_.eval.every_updates == 0 || finished();
}

EvalReport Trainer::evaluate_now() const {
  envs::EnvConfig ec = cfg_.env;
  return evaluate(agent_, ec, cfg_.eval.envs, cfg_.eval.episodes, numerics::mix_seed(cfg_.seed, 1000003));
}

MetricsRow Trainer::iterate() {
  const auto t0 = std::chrono::steady_clock::now();
  const envs::EnvSpec& spec = env_.spec();
  const size_t n_terms = spec.reward_terms.size();
  std::vector<double> term_sums(n_terms, 0.0);
  double finished_sum = 0.0;
  int finished_count = 0;
  int64_t step_count = 0;
  auto on_step = [&](const envs::BatchStep& s) {
    for (int i = 0; i < env_.size(); ++i) {
      const auto ui = static_cast<size_t>(i);
      episode_return_[ui] += s.reward(i, 0);
      for (size_t k = 0; k < n_terms; ++k) term_sums[k] += s.terms(i, static_cast<Eigen::Index>(k));
      if (s.terminated[ui] || s.truncated[ui]) {
        finished_sum += episode_return_[ui];
        ++finished_count;
        episode_return_[ui] = 0.0;
      }
      ++step_count;
    }
  };

  const ppo::RolloutBatch batch = ppo::collect_rollout(env_, agent_, ppo_.value_normalizer(),
                                                       cfg_.ppo.rollout_length, rng_, ppo_.version(), on_step);
  global_step_ += static_cast<int64_t>(batch.rows());
  if (aux_) memory_.push(batch);
  const ppo::UpdateStats ps = ppo_.update(batch);
  ssl::AuxStats as;
  if (aux_) {
    const int mb_size = batch.rows() / cfg_.ppo.minibatches;
    as = aux_->update(memory_, cfg_.ppo.minibatches, mb_size);
  }
  ++updates_;

  MetricsRow row;
  auto& v = row.values;
  v = {static_cast<double>(global_step_), static_cast<double>(updates_), 0.0,
       finished_count ? finished_sum / finished_count : kNaN, static_cast<double>(finished_count)};
  for (double s : term_sums) v.push_back(s / static_cast<double>(step_count));
  v.insert(v.end(), {ps.policy_loss, ps.value_loss, ps.entropy_loss, ps.clip_fraction, ps.approx_kl, ps.grad_norm});
  if (aux_) {
    v.insert(v.end(), {as.loss, as.reconstruction, as.prop_mse, as.dynamics, as.tactile_forecast, as.grad_norm});
    if (cfg_.aux.uses_decoder()) {
      v.insert(v.end(), {static_cast<double>(as.counts.tp), static_cast<double>(as.counts.fp),
                         static_cast<double>(as.counts.tn), static_cast<double>(as.counts.fn)});
    } else {
      v.insert(v.end(), 4, kNaN);
    }
  } else {
    v.insert(v.end(), 10, kNaN);
  }
  const size_t eval_cols = columns_.size() - v.size();
  if (eval_due()) {
    const EvalReport r = evaluate_now();
    v.push_back(r.return_mean);
    v.push_back(r.return_std);
    v.insert(v.end(), r.term_means.begin(), r.term_means.end());
    v.insert(v.end(), {r.physical_mean, r.physical_max, r.physical_median});
    if (spec.id == envs::EnvId::kFind2d) {
      v.insert(v.end(), r.time_to_find.begin(), r.time_to_find.end());
      v.insert(v.end(), r.found_fraction.begin(), r.found_fraction.end());
    }
  } else {
    v.insert(v.end(), eval_cols, kNaN);
  }
  wall_time_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v[2] = wall_time_;
  return row;
}

void Trainer::save_checkpoint(const std::string& path) const {
  numerics::TensorArchive ar;
  auto& m = ar.meta();
  m["format"] = kCheckpointFormat;
  m["config_hash"] = hash_hex(config_hash(cfg_));
  m["config"] = to_toml(cfg_);
  m["global_step"] = global_step_;
  m["updates"] = updates_;
  m["wall_time"] = wall_time_;
  m["rng"] = rng_.serialize();
  m["episode_return"] = episode_return_;
  m["env"] = env_.save_state();
  agent_.save(ar);
  ppo_.save(ar);
  if (aux_) {
    aux_->save(ar);
    save_memory(ar, memory_);
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  ar.save(path);
}

void Trainer::load_checkpoint(const std::string& path) {
  const numerics::TensorArchive ar = numerics::TensorArchive::load(path);
  check_checkpoint(ar, cfg_);
  const auto& m = ar.meta();
  agent_.load(ar);
  ppo_.load(ar);
  if (aux_) {
    aux_->load(ar);
    load_memory(ar, memory_);
  }
  env_.load_state(m.at("env"));
  rng_.deserialize(m.at("rng").get<std::string>());
  episode_return_ = m.at("episode_return").get<std::vector<double>>();
  global_step_ = m.at("global_step").get<int64_t>();
  updates_ = m.at("updates").get<int64_t>();
  wall_time_ = m.at("wall_time").get<double>();
}

void Trainer::write_manifest(const std::string& status) const {
  const envs::EnvSpec& spec = env_.spec();
  nlohmann::ordered_json j;
  j["name"] = cfg_.name;
  j["status"] = status;
  j["config_hash"] = hash_hex(config_hash(cfg_));
  j["seed"] = cfg_.seed;
  j["env"] = envs::to_string(spec.id);
  j["obs_dim"] = spec.obs_dim;
  j["action_dim"] = spec.action_dim;
  j["latent_dim"] = cfg_.agent.latent_dim();
  j["objective"] = ssl::to_string(cfg_.aux.objective);
  j["memory_rollouts"] = cfg_.aux.memory_rollouts;
  j["memory_bytes"] = memory_.footprint_bytes();
  j["total_steps"] = cfg_.total_steps;
  j["global_step"] = global_step_;
  j["updates"] = updates_;
  j["wall_time"] = wall_time_;
  j["metrics"] = "metrics.csv";
  j["checkpoint"] = "checkpoints/latest";
  j["columns"] = columns_;
  const fs::path out(cfg_.out_dir);
  const fs::path tmp = out / "manifest.json.tmp";
  {
    std::ofstream f(tmp);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, out / "manifest.json");
}

void Trainer::run() {
  if (cfg_.out_dir.empty()) throw ConfigError("run: out_dir is not set");
  const fs::path out(cfg_.out_dir);
  fs::create_directories(out / "checkpoints");
  const std::string latest = (out / "checkpoints" / "latest").string();
  const std::string metrics = (out / "metrics.csv").string();
  if (checkpoint_exists(latest)) {
    load_checkpoint(latest);
    if (fs::exists(metrics)) truncate_metrics(metrics, static_cast<double>(global_step_));
  } else if (fs::exists(metrics)) {
    fs::remove(metrics);
  }
  {
    std::ofstream f(out / "config.toml");
    f << to_toml(cfg_);
  }
  MetricsLog log(metrics, columns_);
  write_manifest("running");
  while (!finished()) {
    MetricsRow row;
    try {
      row = iterate();
    } catch (const numerics::NumericError& e) {
      const std::string abort_path = (out / "checkpoints" / "abort").string();
      save_checkpoint(abort_path);
      write_manifest("aborted");
      throw TrainingAborted(e.what(), abort_path);
    }
    log.append(row);
    if (updates_ % cfg_.checkpoint_every_updates == 0 || finished()) {
      save_checkpoint(latest);
      write_manifest(finished() ? "finished" : "running");
    }
  }
  write_manifest("finished");
}

}  // namespace roto::harness
