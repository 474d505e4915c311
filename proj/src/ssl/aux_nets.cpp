#include "roto/ssl/aux_nets.hpp"

namespace roto::ssl {

using numerics::Activation;
using numerics::Matrix;
using numerics::MlpSpec;

namespace {

MlpSpec make_spec(int in, const std::vector<int>& hidden, int out, Activation output) {
  MlpSpec s;
  s.layer_sizes.push_back(in);
  for (int h : hidden) s.layer_sizes.push_back(h);
  s.layer_sizes.push_back(out);
  s.hidden_activation = Activation::kElu;
  s.output_activation = output;
  return s;
}

void append(std::vector<Matrix*>& out, numerics::ParamSet& p) {
  for (Matrix* t : p.tensors()) out.push_back(t);
}

}  // namespace

AuxNets::AuxNets(const AuxConfig& cfg, const ObsLayout& layout, const numerics::Mlp& encoder,
                 int action_dim, numerics::Rng& rng) {
  const int latent = encoder.spec().output_dim();
  has_decoder = cfg.uses_decoder();
  has_prop_decoder = cfg.objective == Objective::kFR;
  has_dynamics = cfg.uses_sequences();
  if (has_decoder) {
    decoder = numerics::Mlp(make_spec(latent, cfg.decoder_hidden, layout.history * layout.tact_dim,
                                      Activation::kSigmoid), rng);
  }
  if (has_prop_decoder) {
    prop_decoder = numerics::Mlp(make_spec(latent, cfg.decoder_hidden, layout.history * layout.prop_dim,
                                           Activation::kIdentity), rng);
  }
  if (has_dynamics) {
    forward_model = numerics::Mlp(make_spec(latent + action_dim, cfg.forward_hidden, latent, Activation::kIdentity), rng);
    projector = numerics::Mlp(make_spec(latent, cfg.projector_hidden, latent, Activation::kIdentity), rng);
    target_encoder = encoder;
  }
}

std::vector<Matrix*> AuxNets::trainable() {
  std::vector<Matrix*> out;
  if (has_decoder) append(out, decoder.params());
  if (has_prop_decoder) append(out, prop_decoder.params());
  if (has_dynamics) {
    append(out, forward_model.params());
    append(out, projector.params());
  }
  return out;
}

void AuxNets::save(numerics::TensorArchive& ar, const std::string& prefix) const {
  if (has_decoder) ar.put_params(prefix + "decoder.", decoder.params());
  if (has_prop_decoder) ar.put_params(prefix + "prop_decoder.", prop_decoder.params());
  if (has_dynamics) {
    ar.put_params(prefix + "forward.", forward_model.params());
    ar.put_params(prefix + "projector.", projector.params());
    ar.put_params(prefix + "target_encoder.", target_encoder.params());
  }
}

void AuxNets::load(const numerics::TensorArchive& ar, const std::string& prefix) {
  if (has_decoder) ar.get_params(prefix + "decoder.", decoder.params());
  if (has_prop_decoder) ar.get_params(prefix + "prop_decoder.", prop_decoder.params());
  if (has_dynamics) {
    ar.get_params(prefix + "forward.", forward_model.params());
    ar.get_params(prefix + "projector.", projector.params());
    ar.get_params(prefix + "target_encoder.", target_encoder.params());
  }
}

AuxGrads AuxGrads::zeros_like(const numerics::Mlp& encoder, const AuxNets& nets) {
  AuxGrads g;
  g.encoder = encoder.zero_grads();
  if (nets.has_decoder) g.decoder = nets.decoder.zero_grads();
  if (nets.has_prop_decoder) g.prop_decoder = nets.prop_decoder.zero_grads();
  if (nets.has_dynamics) {
    g.forward_model = nets.forward_model.zero_grads();
    g.projector = nets.projector.zero_grads();
    g.target_encoder = nets.target_encoder.zero_grads();
  }
  return g;
}

std::vector<Matrix*> AuxGrads::trainable(const AuxNets& nets) {
  std::vector<Matrix*> out;
  append(out, encoder);
  if (nets.has_decoder) append(out, decoder);
  if (nets.has_prop_decoder) append(out, prop_decoder);
  if (nets.has_dynamics) {
    append(out, forward_model);
    append(out, projector);
  }
  return out;
}

void AuxGrads::set_zero() {
  encoder.set_zero();
  decoder.set_zero();
  prop_decoder.set_zero();
  forward_model.set_zero();
  projector.set_zero();
  target_encoder.set_zero();
}

}  // namespace roto::ssl
