#pragma once

#include <cstdint>

#include "roto/agent/agent.hpp"
#include "roto/auxmem/aux_memory.hpp"
#include "roto/numerics/archive.hpp"
#include "roto/numerics/optim.hpp"
#include "roto/ssl/losses.hpp"

namespace roto::ssl {

struct AuxStats {
  double loss = 0.0;  // mean unscaled auxiliary loss over steps
  double reconstruction = 0.0;
  double prop_mse = 0.0;
  double dynamics = 0.0;
  double tactile_forecast = 0.0;
  double grad_norm = 0.0;  // mean global norm of the scaled gradients
  ContactCounts counts;
  int steps = 0;
};

// Trains the encoder and auxiliary networks on c_aux * L_aux with its own Adam
// optimizer (no gradient clipping), and keeps the target encoder as an EMA of
// the encoder.
class AuxLearner {
 public:
  AuxLearner(agent::Agent& agent, AuxConfig cfg, ObsLayout layout, uint64_t seed);

  const AuxConfig& config() const { return cfg_; }
  const ObsLayout& layout() const { return layout_; }
  AuxNets& nets() { return nets_; }
  const AuxNets& nets() const { return nets_; }
  numerics::Rng& rng() { return rng_; }

  AuxBatch sample(const auxmem::AuxMemory& memory, int batch_size);
  // One optimizer step on a fixed batch. Throws NumericError on a non-finite loss.
  AuxStats step(const AuxBatch& batch);
  // e_T <- e_T + tau * (e - e_T); a no-op for objectives without a target encoder.
  void update_target();
  // `minibatches` sampled steps, then one target update.
  AuxStats update(const auxmem::AuxMemory& memory, int minibatches, int batch_size);

  void save(numerics::TensorArchive& ar) const;
  void load(const numerics::TensorArchive& ar);

 private:
  agent::Agent& agent_;
  AuxConfig cfg_;
  ObsLayout layout_;
  AuxNets nets_;
  AuxGrads grads_;
  numerics::AdamState adam_;
  numerics::Rng rng_;
};

}  // namespace roto::ssl
