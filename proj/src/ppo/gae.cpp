#include "roto/ppo/gae.hpp"

#include <cmath>

namespace roto::ppo {

GaeResult compute_gae(const RolloutBatch& batch, double gamma, double lambda) {
  batch.validate();
  const int b = batch.num_envs;
  GaeResult out;
  out.advantages.resize(batch.rows(), 1);
  for (int i = 0; i < b; ++i) {
    double gae = 0.0;
    for (int t = batch.length - 1; t >= 0; --t) {
      const int r = RolloutBatch::row(t, i, b);
      const double next_value = t == batch.length - 1
                                    ? batch.bootstrap_values(i, 0)
                                    : batch.values(RolloutBatch::row(t + 1, i, b), 0);
      const double nonterminal = batch.done(r) ? 0.0 : 1.0;
      const double delta = batch.rewards(r, 0) + gamma * next_value * nonterminal - batch.values(r, 0);
      gae = delta + gamma * lambda * nonterminal * gae;
      out.advantages(r, 0) = gae;
    }
  }
  out.returns = out.advantages + batch.values;
  return out;
}

void normalize_advantages(Matrix& adv) {
  const double n = static_cast<double>(adv.size());
  const double mean = adv.sum() / n;
  const double var = (adv.array() - mean).square().sum() / n;
  adv = ((adv.array() - mean) / std::sqrt(var + 1e-8)).matrix();
}

}  // namespace roto::ppo
