#include "roto/harness/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "roto/analysis/ksg.hpp"
#include "roto/analysis/pca.hpp"
#include "roto/harness/checkpoint.hpp"
#include "roto/harness/metrics_log.hpp"

namespace roto::harness {

namespace fs = std::filesystem;

std::vector<std::string> ground_truth_names(envs::EnvId id) {
  switch (id) {
    case envs::EnvId::kFind2d: return {"disc_x", "disc_y", "tip_x", "tip_y", "distance"};
    case envs::EnvId::kBounce2d: return {"ball_x", "ball_y", "ball_vx", "ball_vy", "steps_since_contact"};
    case envs::EnvId::kOrbit2d:
      return {"disc0_x", "disc0_y", "disc1_x", "disc1_y", "disc0_vx", "disc0_vy", "disc1_vx", "disc1_vy",
              "disc_separation"};
  }
  return {};
}

LoadedAgent load_agent(const std::string& checkpoint) {
  if (!checkpoint_exists(checkpoint)) throw ConfigError("no checkpoint at " + checkpoint);
  const numerics::TensorArchive ar = numerics::TensorArchive::load(checkpoint);
  LoadedAgent out{checkpoint_config(ar), {}};
  check_checkpoint(ar, out.config);
  numerics::Rng rng(0);
  out.agent = agent::Agent(out.config.agent, rng);
  out.agent.load(ar);
  return out;
}

std::string latest_checkpoint(const std::string& run_dir) {
  return (fs::path(run_dir) / "checkpoints" / "latest").string();
}

MiReport mi_from_samples(const analysis::SampleSet& samples, const std::vector<std::string>& features,
                         const MiOptions& opt) {
  samples.validate();
  if (static_cast<Eigen::Index>(features.size()) != samples.s.cols()) {
    throw std::invalid_argument("mi_from_samples: feature names do not match state columns");
  }
  MiReport r;
  r.samples = static_cast<int>(samples.z.rows());
  r.k = opt.k;
  r.latent_dim = static_cast<int>(samples.z.cols());
  r.pca = std::min(opt.pca, r.latent_dim);
  const analysis::PcaResult pca = analysis::pca_fit_transform(samples.z, r.pca);
  r.explained_variance = pca.model.explained_variance_ratio.sum();
  const analysis::KsgOptions ko{opt.k, 1e-10, opt.seed};
  r.mi_joint = analysis::ksg_mi(pca.scores, samples.s, ko);
  r.features = features;
  r.mi_marginal = analysis::marginal_mi(pca.scores, samples.s, ko);
  r.ranking.resize(features.size());
  std::iota(r.ranking.begin(), r.ranking.end(), 0);
  std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](int a, int b) {
    return r.mi_marginal[static_cast<size_t>(a)] > r.mi_marginal[static_cast<size_t>(b)];
  });
  return r;
}

MiReport analyze_mi(const agent::Agent& agent, envs::EnvConfig env, const MiOptions& opt) {
  env.batch = opt.envs;
  env.seed = opt.seed;
  env.auto_reset = true;
  const analysis::SampleSet samples = analysis::collect_samples(agent, env, opt.samples);
  return mi_from_samples(samples, ground_truth_names(env.env_id), opt);
}

nlohmann::ordered_json to_json(const MiReport& r) {
  nlohmann::ordered_json j;
  j["samples"] = r.samples;
  j["pca_components"] = r.pca;
  j["k"] = r.k;
  j["latent_dim"] = r.latent_dim;
  j["explained_variance"] = r.explained_variance;
  j["mi_joint"] = r.mi_joint;
  auto& m = j["mi_marginal"] = nlohmann::ordered_json::object();
  for (size_t i = 0; i < r.features.size(); ++i) m[r.features[i]] = r.mi_marginal[i];
  auto& rank = j["ranking"] = nlohmann::ordered_json::array();
  for (int i : r.ranking) rank.push_back(r.features[static_cast<size_t>(i)]);
  return j;
}

TactilePredReport analyze_tactile_pred(const std::string& run_dir) {
  const MetricsTable t = read_metrics((fs::path(run_dir) / "metrics.csv").string());
  const int tp = t.column("aux_tp"), fp = t.column("aux_fp"), tn = t.column("aux_tn"), fn = t.column("aux_fn");
  if (tp < 0 || fp < 0 || tn < 0 || fn < 0) throw ConfigError("metrics.csv has no contact-prediction counts");
  TactilePredReport r;
  for (const auto& row : t.rows) {
    const double v = row[static_cast<size_t>(tp)];
    if (std::isnan(v)) continue;
    analysis::ConfusionCounts c;
    c.tp = static_cast<int64_t>(v);
    c.fp = static_cast<int64_t>(row[static_cast<size_t>(fp)]);
    c.tn = static_cast<int64_t>(row[static_cast<size_t>(tn)]);
    c.fn = static_cast<int64_t>(row[static_cast<size_t>(fn)]);
    r.total += c;
    r.last = c;
    ++r.rows;
  }
  if (r.rows == 0) throw ConfigError("run has no contact predictions (objective without a decoder)");
  r.total_metrics = analysis::classification_metrics(r.total);
  r.last_metrics = analysis::classification_metrics(r.last);
  return r;
}

nlohmann::ordered_json to_json(const TactilePredReport& r) {
  auto metrics = [](const analysis::ConfusionCounts& c, const analysis::ClassificationMetrics& m) {
    auto num = [](double v) { return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v); };
    nlohmann::ordered_json j;
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["tn"] = c.tn;
    j["fn"] = c.fn;
    j["tpr"] = num(m.tpr);
    j["fpr"] = num(m.fpr);
    j["fnr"] = num(m.fnr);
    j["tnr"] = num(m.tnr);
    j["accuracy"] = num(m.accuracy);
    j["precision"] = num(m.precision);
    return j;
  };
  nlohmann::ordered_json j;
  j["rows"] = r.rows;
  j["total"] = metrics(r.total, r.total_metrics);
  j["last"] = metrics(r.last, r.last_metrics);
  return j;
}

}  // namespace roto::harness
