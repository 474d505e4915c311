#include "roto/ssl/aux_config.hpp"

#include <stdexcept>

namespace roto::ssl {

Objective objective_from_string(const std::string& s) {
  if (s == "none") return Objective::kNone;
  if (s == "tr") return Objective::kTR;
  if (s == "fr") return Objective::kFR;
  if (s == "fd") return Objective::kFD;
  if (s == "tfd") return Objective::kTFD;
  throw std::invalid_argument("unknown auxiliary objective '" + s + "' (none, tr, fr, fd, tfd)");
}

std::string to_string(Objective o) {
  switch (o) {
    case Objective::kNone: return "none";
    case Objective::kTR: return "tr";
    case Objective::kFR: return "fr";
    case Objective::kFD: return "fd";
    case Objective::kTFD: return "tfd";
  }
  return "none";
}

void AuxConfig::validate(bool use_tactile) const {
  if (!enabled()) return;
  if (uses_sequences() && horizon < 1) throw std::invalid_argument("aux: horizon must be >= 1");
  if (!(pos_weight > 0.0)) throw std::invalid_argument("aux: pos_weight must be > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("aux: tau must be in (0, 1]");
  if (!(lr_aux >= 0.0) || !(c_aux >= 0.0)) throw std::invalid_argument("aux: lr_aux and c_aux must be >= 0");
  if (memory_rollouts < 1) throw std::invalid_argument("aux: memory_rollouts must be >= 1");
  if (requires_tactile() && !use_tactile) {
    throw std::invalid_argument("aux: objective '" + to_string(objective) + "' needs tactile observations");
  }
}

ObsLayout ObsLayout::from_spec(const envs::EnvSpec& spec) {
  return ObsLayout{spec.prop_dim, spec.use_tactile ? spec.tact_dim : 0, spec.history};
}

Matrix ObsLayout::tactile(const Matrix& obs) const {
  Matrix out(obs.rows(), static_cast<Eigen::Index>(history) * tact_dim);
  for (int f = 0; f < history; ++f) {
    out.middleCols(f * tact_dim, tact_dim) = obs.middleCols(f * frame_dim() + prop_dim, tact_dim);
  }
  return out;
}

Matrix ObsLayout::prop(const Matrix& obs) const {
  Matrix out(obs.rows(), static_cast<Eigen::Index>(history) * prop_dim);
  for (int f = 0; f < history; ++f) {
    out.middleCols(f * prop_dim, prop_dim) = obs.middleCols(f * frame_dim(), prop_dim);
  }
  return out;
}

Matrix ObsLayout::newest_tactile(const Matrix& obs) const {
  return obs.middleCols((history - 1) * frame_dim() + prop_dim, tact_dim);
}

Matrix ObsLayout::newest_of_stacked_tactile(const Matrix& tact) const {
  return tact.rightCols(tact_dim);
}

}  // namespace roto::ssl
