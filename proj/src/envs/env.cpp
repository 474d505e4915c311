#include "roto/envs/env.hpp"

#include <stdexcept>

namespace roto::envs {

EnvId env_id_from_string(const std::string& name) {
  if (name == "find2d") return EnvId::kFind2d;
  if (name == "bounce2d") return EnvId::kBounce2d;
  if (name == "orbit2d") return EnvId::kOrbit2d;
  throw std::invalid_argument("unknown env_id: " + name);
}

std::string to_string(EnvId id) {
  switch (id) {
    case EnvId::kFind2d: return "find2d";
    case EnvId::kBounce2d: return "bounce2d";
    case EnvId::kOrbit2d: return "orbit2d";
  }
  return "?";
}

EnvConfig EnvConfig::defaults(EnvId id) {
  EnvConfig c;
  c.env_id = id;
  switch (id) {
    case EnvId::kFind2d:
      c.history = 16;
      c.episode_length = 300;
      break;
    case EnvId::kBounce2d:
      c.history = 4;
      c.episode_length = 600;
      c.object_jitter = 0.01;
      break;
    case EnvId::kOrbit2d:
      c.history = 4;
      c.episode_length = 600;
      c.object_jitter = 0.005;
      break;
  }
  return c;
}

void EnvConfig::validate() const {
  if (batch < 1) throw std::invalid_argument("env.batch must be >= 1");
  if (history < 1) throw std::invalid_argument("env.history must be >= 1");
  if (episode_length < 1) throw std::invalid_argument("env.episode_length must be >= 1");
  if (control_substeps < 1) throw std::invalid_argument("env.control_substeps must be >= 1");
  if (!(physics_dt > 0.0)) throw std::invalid_argument("env.physics_dt must be > 0");
  if (home_jitter_deg < 0.0 || home_jitter_fraction < 0.0 || object_jitter < 0.0) {
    throw std::invalid_argument("env randomization magnitudes must be >= 0");
  }
}

EnvSpec make_spec(const EnvConfig& cfg) {
  EnvSpec s;
  s.id = cfg.env_id;
  switch (cfg.env_id) {
    case EnvId::kFind2d:
      s.action_dim = 2;
      s.prop_dim = 10;
      s.tact_dim = 2;
      s.gt_dim = 5;
      s.reward_terms = {"dist"};
      s.reward_scales = {cfg.scales.dist};
      break;
    case EnvId::kBounce2d:
      s.action_dim = 3;
      s.prop_dim = 9;
      s.tact_dim = 5;
      s.gt_dim = 5;
      s.reward_terms = {"air", "bounce", "fall"};
      s.reward_scales = {cfg.scales.air, cfg.scales.bounce, cfg.scales.fall};
      break;
    case EnvId::kOrbit2d:
      s.action_dim = 8;
      s.prop_dim = 24;
      s.tact_dim = 6;
      s.gt_dim = 9;
      s.reward_terms = {"target_dist_0", "target_dist_1", "rotation", "fall"};
      s.reward_scales = {cfg.scales.target_dist, cfg.scales.target_dist, cfg.scales.rotation,
                         cfg.scales.fall};
      break;
  }
  s.use_tactile = cfg.use_tactile;
  s.frame_dim = s.prop_dim + (cfg.use_tactile ? s.tact_dim : 0);
  s.history = cfg.history;
  s.obs_dim = s.history * s.frame_dim;
  s.episode_length = cfg.episode_length;
  return s;
}

}  // namespace roto::envs
