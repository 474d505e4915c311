#include "roto/harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tomlplusplus/toml.hpp>

namespace roto::harness {

namespace {

// Reads typed values from one TOML table and rejects keys nobody asked for.
class Section {
 public:
  Section(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

  bool present() const { return t_ != nullptr; }

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    if (!t_) return;
    const toml::node* n = t_->get(key);
    if (!n) return;
    if constexpr (std::is_same_v<T, bool>) {
      auto v = n->value<bool>();
      if (!v || !n->is_boolean()) fail(key, "a boolean");
      out = *v;
    } else if constexpr (std::is_integral_v<T>) {
      if (!n->is_integer()) fail(key, "an integer");
      const int64_t v = *n->value<int64_t>();
      if constexpr (std::is_unsigned_v<T>) {
        if (v < 0) fail(key, "a non-negative integer");
      }
      out = static_cast<T>(v);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!n->is_number()) fail(key, "a number");
      out = *n->value<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!n->is_string()) fail(key, "a string");
      out = *n->value<std::string>();
    } else {
      const toml::array* arr = n->as_array();
      if (!arr) fail(key, "an array of integers");
      out.clear();
      for (const auto& e : *arr) {
        if (!e.is_integer()) fail(key, "an array of integers");
        out.push_back(static_cast<int>(*e.value<int64_t>()));
      }
    }
  }

  Section sub(const char* key) {
    used_.insert(key);
    if (!t_) return Section(nullptr, path_ + key);
    const toml::node* n = t_->get(key);
    if (n && !n->is_table()) throw ConfigError(path_ + key + ": expected a table");
    return Section(n ? n->as_table() : nullptr, path_ + key + ".");
  }

  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_) {
      const std::string key(k.str());
      if (!used_.count(key)) throw ConfigError("unknown configuration key '" + path_ + key + "'");
    }
  }

 private:
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError(path_ + key + ": expected " + what);
  }
  const toml::table* t_;
  std::string path_;
  std::set<std::string> used_;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

template <typename F>
void wrap(const char* section, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(section) + ": " + e.what());
  }
}

std::string render(const RunConfig& c, bool identity_only) {
  std::ostringstream o;
  if (!identity_only) {
    o << "name = " << quote(c.name) << "\n";
    o << "total_steps = " << c.total_steps << "\n";
    if (!c.out_dir.empty()) o << "out_dir = " << quote(c.out_dir) << "\n";
  }
  o << "seed = " << c.seed << "\n";
  o << "checkpoint_every_updates = " << c.checkpoint_every_updates << "\n";
  const auto& e = c.env;
  o << "\n[env]\n"
    << "id = " << quote(envs::to_string(e.env_id)) << "\n"
    << "batch = " << e.batch << "\n"
    << "history = " << e.history << "\n"
    << "episode_length = " << e.episode_length << "\n"
    << "physics_dt = " << fmt_double(e.physics_dt) << "\n"
    << "control_substeps = " << e.control_substeps << "\n"
    << "home_jitter_deg = " << fmt_double(e.home_jitter_deg) << "\n"
    << "home_jitter_fraction = " << fmt_double(e.home_jitter_fraction) << "\n"
    << "object_jitter = " << fmt_double(e.object_jitter) << "\n"
    << "use_tactile = " << (e.use_tactile ? "true" : "false") << "\n"
    << "object_present = " << (e.object_present ? "true" : "false") << "\n"
    << "pegs_active = " << (e.pegs_active ? "true" : "false") << "\n";
  o << "\n[env.rewards]\n"
    << "dist = " << fmt_double(e.scales.dist) << "\n"
    << "air = " << fmt_double(e.scales.air) << "\n"
    << "bounce = " << fmt_double(e.scales.bounce) << "\n"
    << "fall = " << fmt_double(e.scales.fall) << "\n"
    << "target_dist = " << fmt_double(e.scales.target_dist) << "\n"
    << "rotation = " << fmt_double(e.scales.rotation) << "\n";
  const auto& a = c.agent;
  o << "\n[agent]\n"
    << "encoder_hidden = " << fmt_list(a.encoder_hidden) << "\n"
    << "policy_hidden = " << fmt_list(a.policy_hidden) << "\n"
    << "value_hidden = " << fmt_list(a.value_hidden) << "\n"
    << "init_log_std = " << fmt_double(a.init_log_std) << "\n"
    << "policy_output_scale = " << fmt_double(a.policy_output_scale) << "\n";
  const auto& p = c.ppo;
  o << "\n[ppo]\n"
    << "gamma = " << fmt_double(p.gamma) << "\n"
    << "gae_lambda = " << fmt_double(p.gae_lambda) << "\n"
    << "ratio_clip = " << fmt_double(p.ratio_clip) << "\n"
    << "value_clip = " << fmt_double(p.value_clip) << "\n"
    << "c_value = " << fmt_double(p.c_value) << "\n"
    << "c_entropy = " << fmt_double(p.c_entropy) << "\n"
    << "lr = " << fmt_double(p.lr) << "\n"
    << "rollout_length = " << p.rollout_length << "\n"
    << "minibatches = " << p.minibatches << "\n"
    << "epochs = " << p.epochs << "\n"
    << "max_grad_norm = " << fmt_double(p.max_grad_norm) << "\n"
    << "normalize_advantages = " << (p.normalize_advantages ? "true" : "false") << "\n";
  const auto& x = c.aux;
  o << "\n[aux]\n"
    << "objective = " << quote(ssl::to_string(x.objective)) << "\n"
    << "lr_aux = " << fmt_double(x.lr_aux) << "\n"
    << "c_aux = " << fmt_double(x.c_aux) << "\n"
    << "horizon = " << x.horizon << "\n"
    << "pos_weight = " << fmt_double(x.pos_weight) << "\n"
    << "tau = " << fmt_double(x.tau) << "\n"
    << "memory_rollouts = " << x.memory_rollouts << "\n"
    << "decoder_hidden = " << fmt_list(x.decoder_hidden) << "\n"
    << "forward_hidden = " << fmt_list(x.forward_hidden) << "\n"
    << "projector_hidden = " << fmt_list(x.projector_hidden) << "\n";
  o << "\n[eval]\n"
    << "every_updates = " << c.eval.every_updates << "\n"
    << "envs = " << c.eval.envs << "\n"
    << "episodes = " << c.eval.episodes << "\n";
  return o.str();
}

}  // namespace

int64_t RunConfig::total_updates() const {
  const int64_t per = steps_per_update();
  return per > 0 ? (total_steps + per - 1) / per : 0;
}

void RunConfig::finalize() {
  wrap("env", [&] { env.validate(); });
  const envs::EnvSpec spec = envs::make_spec(env);
  agent.obs_dim = spec.obs_dim;
  agent.action_dim = spec.action_dim;
  wrap("agent", [&] { agent.validate(); });
  wrap("ppo", [&] { ppo.validate(env.batch); });
  wrap("aux", [&] { aux.validate(env.use_tactile); });
  if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (eval.every_updates < 1 || eval.envs < 1 || eval.episodes < 1) {
    throw ConfigError("eval: every_updates, envs and episodes must be >= 1");
  }
  if (checkpoint_every_updates < 1) throw ConfigError("checkpoint_every_updates must be >= 1");
}

RunConfig parse_config(const std::string& toml_text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(toml_text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  Section top(&root, "");
  RunConfig c;
  top.read("name", c.name);
  top.read("seed", c.seed);
  top.read("total_steps", c.total_steps);
  top.read("out_dir", c.out_dir);
  top.read("checkpoint_every_updates", c.checkpoint_every_updates);

  Section env = top.sub("env");
  std::string id = "find2d";
  env.read("id", id);
  try {
    c.env = envs::EnvConfig::defaults(envs::env_id_from_string(id));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("env.id: ") + e.what());
  }
  env.read("batch", c.env.batch);
  env.read("history", c.env.history);
  env.read("episode_length", c.env.episode_length);
  env.read("physics_dt", c.env.physics_dt);
  env.read("control_substeps", c.env.control_substeps);
  env.read("home_jitter_deg", c.env.home_jitter_deg);
  env.read("home_jitter_fraction", c.env.home_jitter_fraction);
  env.read("object_jitter", c.env.object_jitter);
  env.read("use_tactile", c.env.use_tactile);
  env.read("object_present", c.env.object_present);
  env.read("pegs_active", c.env.pegs_active);
  Section rw = env.sub("rewards");
  rw.read("dist", c.env.scales.dist);
  rw.read("air", c.env.scales.air);
  rw.read("bounce", c.env.scales.bounce);
  rw.read("fall", c.env.scales.fall);
  rw.read("target_dist", c.env.scales.target_dist);
  rw.read("rotation", c.env.scales.rotation);
  rw.finish();
  env.finish();
  c.env.seed = c.seed;
  c.env.auto_reset = true;

  Section ag = top.sub("agent");
  ag.read("encoder_hidden", c.agent.encoder_hidden);
  ag.read("policy_hidden", c.agent.policy_hidden);
  ag.read("value_hidden", c.agent.value_hidden);
  ag.read("init_log_std", c.agent.init_log_std);
  ag.read("policy_output_scale", c.agent.policy_output_scale);
  ag.finish();

  Section pp = top.sub("ppo");
  pp.read("gamma", c.ppo.gamma);
  pp.read("gae_lambda", c.ppo.gae_lambda);
  pp.read("ratio_clip", c.ppo.ratio_clip);
  pp.read("value_clip", c.ppo.value_clip);
  pp.read("c_value", c.ppo.c_value);
  pp.read("c_entropy", c.ppo.c_entropy);
  pp.read("lr", c.ppo.lr);
  pp.read("rollout_length", c.ppo.rollout_length);
  pp.read("minibatches", c.ppo.minibatches);
  pp.read("epochs", c.ppo.epochs);
  pp.read("max_grad_norm", c.ppo.max_grad_norm);
  pp.read("normalize_advantages", c.ppo.normalize_advantages);
  pp.finish();

  Section ax = top.sub("aux");
  std::string objective = "none";
  ax.read("objective", objective);
  try {
    c.aux.objective = ssl::objective_from_string(objective);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("aux.objective: ") + e.what());
  }
  ax.read("lr_aux", c.aux.lr_aux);
  ax.read("c_aux", c.aux.c_aux);
  ax.read("horizon", c.aux.horizon);
  ax.read("pos_weight", c.aux.pos_weight);
  ax.read("tau", c.aux.tau);
  ax.read("memory_rollouts", c.aux.memory_rollouts);
  ax.read("decoder_hidden", c.aux.decoder_hidden);
  ax.read("forward_hidden", c.aux.forward_hidden);
  ax.read("projector_hidden", c.aux.projector_hidden);
  ax.finish();

  Section ev = top.sub("eval");
  ev.read("every_updates", c.eval.every_updates);
  ev.read("envs", c.eval.envs);
  ev.read("episodes", c.eval.episodes);
  ev.finish();
  top.finish();

  c.finalize();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string to_toml(const RunConfig& cfg) { return render(cfg, false); }

uint64_t config_hash(const RunConfig& cfg) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : render(cfg, true)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_sweep_ranges(const RunConfig& c) {
  auto in = [](int v, std::initializer_list<int> set) { return std::find(set.begin(), set.end(), v) != set.end(); };
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("outside sweep range: " + what);
  };
  check(in(c.ppo.rollout_length, {16, 32, 64}), "ppo.rollout_length in {16, 32, 64}");
  check(in(c.ppo.minibatches, {4, 8, 16, 32, 64}), "ppo.minibatches in {4, 8, 16, 32, 64}");
  check(in(c.ppo.epochs, {4, 8, 16, 32}), "ppo.epochs in {4, 8, 16, 32}");
  check(c.ppo.lr >= 1e-5 && c.ppo.lr <= 1e-3, "ppo.lr in [1e-5, 1e-3]");
  check(c.ppo.c_entropy == 0.0 || c.ppo.c_entropy == 0.05 || c.ppo.c_entropy == 0.1, "ppo.c_entropy in {0, 0.05, 0.1}");
  if (c.aux.enabled()) {
    check(c.aux.lr_aux >= 1e-5 && c.aux.lr_aux <= 1e-3, "aux.lr_aux in [1e-5, 1e-3]");
    check(c.aux.c_aux >= 1e-3 && c.aux.c_aux <= 10.0, "aux.c_aux in [1e-3, 10]");
    if (c.aux.uses_sequences()) check(in(c.aux.horizon, {1, 2, 3, 9}), "aux.horizon in {1, 2, 3, 9}");
    check(in(c.aux.memory_rollouts, {1, 2, 3, 4}), "aux.memory_rollouts in {1, 2, 3, 4}");
  }
}

}  // namespace roto::harness
