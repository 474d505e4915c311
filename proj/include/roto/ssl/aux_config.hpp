#pragma once

#include <string>
#include <vector>

#include "roto/envs/env.hpp"
#include "roto/numerics/matrix.hpp"

namespace roto::ssl {

using numerics::Matrix;

enum class Objective { kNone, kTR, kFR, kFD, kTFD };

Objective objective_from_string(const std::string& s);  // "none", "tr", "fr", "fd", "tfd"
std::string to_string(Objective o);

struct AuxConfig {
  Objective objective = Objective::kNone;
  double lr_aux = 1e-4;
  double c_aux = 1.0;
  int horizon = 1;  // predicted steps for FD / TFD
  double pos_weight = 10.0;
  double tau = 0.01;
  int memory_rollouts = 1;
  std::vector<int> decoder_hidden = {512, 512};
  std::vector<int> forward_hidden = {512, 256};
  std::vector<int> projector_hidden = {256};

  bool enabled() const { return objective != Objective::kNone; }
  bool uses_sequences() const { return objective == Objective::kFD || objective == Objective::kTFD; }
  bool uses_decoder() const { return objective == Objective::kTR || objective == Objective::kFR || objective == Objective::kTFD; }
  bool requires_tactile() const { return uses_decoder(); }
  // Throws std::invalid_argument; tactile objectives need tactile observations.
  void validate(bool use_tactile) const;
};

// Index map of a stacked observation: history frames, oldest first, each
// [prop (P) | tact (T)].
struct ObsLayout {
  int prop_dim = 0;
  int tact_dim = 0;
  int history = 1;

  static ObsLayout from_spec(const envs::EnvSpec& spec);
  int frame_dim() const { return prop_dim + tact_dim; }
  int obs_dim() const { return history * frame_dim(); }
  Matrix tactile(const Matrix& obs) const;  // M x (history * T)
  Matrix prop(const Matrix& obs) const;     // M x (history * P)
  Matrix newest_tactile(const Matrix& obs) const;  // M x T
  // Newest-frame slice of a stacked tactile matrix (M x history*T).
  Matrix newest_of_stacked_tactile(const Matrix& tact) const;
};

}  // namespace roto::ssl
