#pragma once

#include "roto/ppo/rollout.hpp"

namespace roto::ppo {

struct GaeResult {
  Matrix advantages;  // (R*B) x 1
  Matrix returns;     // advantages + values
};

// Generalized advantage estimation. No bootstrapping across a step flagged
// terminated or truncated.
GaeResult compute_gae(const RolloutBatch& batch, double gamma, double lambda);

// In-place mean 0 / std 1 normalization (population std, 1e-8 guard).
void normalize_advantages(Matrix& adv);

}  // namespace roto::ppo
