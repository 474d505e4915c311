#include "roto/ssl/losses.hpp"

#include <stdexcept>

#include "roto/numerics/losses.hpp"

namespace roto::ssl {

using numerics::GradTape;
using numerics::GradWrt;
using numerics::Mlp;

void ContactCounts::add(const Matrix& prob, const Matrix& truth) {
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    const bool p = prob.data()[i] >= 0.5;
    const bool t = truth.data()[i] > 0.5;
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
    else ++tn;
  }
}

void ContactCounts::merge(const ContactCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
}

namespace {

void require_tactile(const ObsLayout& layout, const char* what) {
  if (layout.tact_dim == 0) throw std::invalid_argument(std::string(what) + ": observations carry no tactile data");
}

// Shared body of TR and FR.
AuxLossTerms reconstruction(const Mlp& encoder, const AuxNets& nets, const ObsLayout& layout,
                            const Matrix& obs, double pos_weight, bool with_prop, AuxGrads* grads) {
  require_tactile(layout, with_prop ? "loss_fr" : "loss_tr");
  if (!nets.has_decoder || (with_prop && !nets.has_prop_decoder)) {
    throw std::logic_error("reconstruction loss: decoder not built for this objective");
  }
  GradTape te, td, tp;
  const Matrix z = encoder.forward(obs, grads ? &te : nullptr);
  const Matrix prob = nets.decoder.forward(z, &td);
  const Matrix tact = layout.tactile(obs);
  const auto bce = numerics::weighted_bce_with_logits(td.pre_activation(), tact, pos_weight);
  AuxLossTerms out;
  out.reconstruction = bce.value;
  out.counts.add(layout.newest_of_stacked_tactile(prob), layout.newest_of_stacked_tactile(tact));
  numerics::LossGrad mse;
  if (with_prop) {
    const Matrix pred = nets.prop_decoder.forward(z, &tp);
    mse = numerics::mse_loss(pred, layout.prop(obs));
    out.prop_mse = mse.value;
  }
  out.total = out.reconstruction + out.prop_mse;
  if (grads) {
    Matrix dz = nets.decoder.backward(td, bce.grad, grads->decoder, GradWrt::kPreActivation);
    if (with_prop) dz += nets.prop_decoder.backward(tp, mse.grad, grads->prop_decoder);
    encoder.backward(te, dz, grads->encoder);
  }
  return out;
}

AuxLossTerms dynamics(const Mlp& encoder, const AuxNets& nets, const ObsLayout* layout,
                      const auxmem::SequenceBatch& seq, double pos_weight, AuxGrads* grads) {
  const bool tactile = layout != nullptr;
  if (!nets.has_dynamics || (tactile && !nets.has_decoder)) {
    throw std::logic_error("dynamics loss: networks not built for this objective");
  }
  const int h = seq.horizon;
  if (h < 1 || static_cast<int>(seq.obs.size()) != h + 1 || static_cast<int>(seq.actions.size()) != h) {
    throw std::invalid_argument("dynamics loss: malformed sequence batch");
  }
  for (const Matrix& d : seq.done) {
    if (d.size() > 0 && !d.isZero(0.0)) throw std::invalid_argument("dynamics loss: window contains a done transition");
  }
  if (tactile) require_tactile(*layout, "loss_tfd");

  const int latent = encoder.spec().output_dim();
  GradTape te;
  std::vector<GradTape> tf(static_cast<size_t>(h)), tp(static_cast<size_t>(h)), td(static_cast<size_t>(h));
  std::vector<Matrix> d_proj(static_cast<size_t>(h)), d_logit(static_cast<size_t>(h));
  AuxLossTerms out;

  Matrix z_hat = encoder.forward(seq.obs[0], grads ? &te : nullptr);
  for (int i = 0; i < h; ++i) {
    const auto k = static_cast<size_t>(i);
    Matrix in(z_hat.rows(), latent + seq.actions[k].cols());
    in.leftCols(latent) = z_hat;
    in.rightCols(seq.actions[k].cols()) = seq.actions[k].cwiseMax(-1.0).cwiseMin(1.0);
    z_hat = nets.forward_model.forward(in, &tf[k]);
    const Matrix proj = nets.projector.forward(z_hat, &tp[k]);
    // Target branch: no tape, no gradient.
    const Matrix target = nets.target_encoder.forward(seq.obs[k + 1]);
    const auto mse = numerics::mse_loss(proj, target);
    out.dynamics += mse.value;
    d_proj[k] = mse.grad;
    if (tactile) {
      const Matrix prob = nets.decoder.forward(z_hat, &td[k]);
      const Matrix tact = layout->tactile(seq.obs[k + 1]);
      const auto bce = numerics::weighted_bce_with_logits(td[k].pre_activation(), tact, pos_weight);
      out.tactile_forecast += bce.value;
      d_logit[k] = bce.grad;
      if (i == 0) out.counts.add(layout->newest_of_stacked_tactile(prob), layout->newest_of_stacked_tactile(tact));
    }
  }
  out.total = out.dynamics + out.tactile_forecast;

  if (grads) {
    Matrix dz = Matrix::Zero(seq.obs[0].rows(), latent);
    for (int i = h - 1; i >= 0; --i) {
      const auto k = static_cast<size_t>(i);
      dz += nets.projector.backward(tp[k], d_proj[k], grads->projector);
      if (tactile) dz += nets.decoder.backward(td[k], d_logit[k], grads->decoder, GradWrt::kPreActivation);
      const Matrix d_in = nets.forward_model.backward(tf[k], dz, grads->forward_model);
      dz = d_in.leftCols(latent);
    }
    encoder.backward(te, dz, grads->encoder);
  }
  return out;
}

}  // namespace

AuxLossTerms loss_tr(const Mlp& encoder, const AuxNets& nets, const ObsLayout& layout, const Matrix& obs,
                     double pos_weight, AuxGrads* grads) {
  return reconstruction(encoder, nets, layout, obs, pos_weight, false, grads);
}

AuxLossTerms loss_fr(const Mlp& encoder, const AuxNets& nets, const ObsLayout& layout, const Matrix& obs,
                     double pos_weight, AuxGrads* grads) {
  return reconstruction(encoder, nets, layout, obs, pos_weight, true, grads);
}

AuxLossTerms loss_fd(const Mlp& encoder, const AuxNets& nets, const auxmem::SequenceBatch& seq, AuxGrads* grads) {
  return dynamics(encoder, nets, nullptr, seq, 0.0, grads);
}

AuxLossTerms loss_tfd(const Mlp& encoder, const AuxNets& nets, const ObsLayout& layout,
                      const auxmem::SequenceBatch& seq, double pos_weight, AuxGrads* grads) {
  return dynamics(encoder, nets, &layout, seq, pos_weight, grads);
}

AuxLossTerms aux_loss(const Mlp& encoder, const AuxNets& nets, const AuxConfig& cfg, const ObsLayout& layout,
                      const AuxBatch& batch, AuxGrads* grads) {
  switch (cfg.objective) {
    case Objective::kTR: return loss_tr(encoder, nets, layout, batch.obs, cfg.pos_weight, grads);
    case Objective::kFR: return loss_fr(encoder, nets, layout, batch.obs, cfg.pos_weight, grads);
    case Objective::kFD: return loss_fd(encoder, nets, batch.seq, grads);
    case Objective::kTFD: return loss_tfd(encoder, nets, layout, batch.seq, cfg.pos_weight, grads);
    case Objective::kNone: break;
  }
  throw std::logic_error("aux_loss: objective is none");
}

}  // namespace roto::ssl
