#pragma once

#include <cstdint>

#include "roto/auxmem/aux_memory.hpp"
#include "roto/numerics/mlp.hpp"
#include "roto/ssl/aux_config.hpp"
#include "roto/ssl/aux_nets.hpp"

namespace roto::ssl {

// Contact classification counts at threshold 0.5 on the predicted probability.
struct ContactCounts {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  void add(const Matrix& prob, const Matrix& truth);
  void merge(const ContactCounts& o);
  int64_t total() const { return tp + fp + tn + fn; }
};

// Unscaled auxiliary loss and its parts. `total` is what the objective
// minimizes; the weighting by c_aux happens in the update.
struct AuxLossTerms {
  double total = 0.0;
  double reconstruction = 0.0;    // weighted BCE of d(z_t) vs stacked o^tact_t
  double prop_mse = 0.0;          // FR proprioceptive term
  double dynamics = 0.0;          // sum over i of MSE(p(z_hat_{t+i}), e_T(o_{t+i}))
  double tactile_forecast = 0.0;  // sum over i of BCE(d(z_hat_{t+i}), o^tact_{t+i})
  ContactCounts counts;           // newest-frame predictions: d(z_t) for TR/FR, d(z_hat_{t+1}) for TFD
};

// Each loss optionally accumulates gradients (+=) into `grads`. Decoder BCE is
// evaluated on the pre-sigmoid logits. Actions enter f clamped to [-1, 1].
AuxLossTerms loss_tr(const numerics::Mlp& encoder, const AuxNets& nets, const ObsLayout& layout,
                     const Matrix& obs, double pos_weight, AuxGrads* grads = nullptr);
AuxLossTerms loss_fr(const numerics::Mlp& encoder, const AuxNets& nets, const ObsLayout& layout,
                     const Matrix& obs, double pos_weight, AuxGrads* grads = nullptr);
AuxLossTerms loss_fd(const numerics::Mlp& encoder, const AuxNets& nets, const auxmem::SequenceBatch& seq,
                     AuxGrads* grads = nullptr);
AuxLossTerms loss_tfd(const numerics::Mlp& encoder, const AuxNets& nets, const ObsLayout& layout,
                      const auxmem::SequenceBatch& seq, double pos_weight, AuxGrads* grads = nullptr);

struct AuxBatch {
  Matrix obs;                // TR / FR
  auxmem::SequenceBatch seq;  // FD / TFD
};

AuxLossTerms aux_loss(const numerics::Mlp& encoder, const AuxNets& nets, const AuxConfig& cfg,
                      const ObsLayout& layout, const AuxBatch& batch, AuxGrads* grads = nullptr);

}  // namespace roto::ssl
