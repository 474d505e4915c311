#pragma once

#include <string>
#include <vector>

#include "roto/numerics/archive.hpp"
#include "roto/numerics/mlp.hpp"
#include "roto/numerics/rng.hpp"
#include "roto/ssl/aux_config.hpp"

namespace roto::ssl {

// Auxiliary networks. Only the members the objective needs are built:
//   decoder          d: z -> 512 -> 512 -> history*T, sigmoid output (TR, FR, TFD)
//   prop_decoder       z -> 512 -> 512 -> history*P, identity output (FR)
//   forward_model    f: [z, a] -> 512 -> 256 -> latent (FD, TFD)
//   projector        p: z_hat -> 256 -> latent, ELU after the first layer (FD, TFD)
//   target_encoder e_T: copy of the encoder, moved only by EMA (FD, TFD)
struct AuxNets {
  numerics::Mlp decoder;
  numerics::Mlp prop_decoder;
  numerics::Mlp forward_model;
  numerics::Mlp projector;
  numerics::Mlp target_encoder;
  bool has_decoder = false;
  bool has_prop_decoder = false;
  bool has_dynamics = false;

  AuxNets() = default;
  AuxNets(const AuxConfig& cfg, const ObsLayout& layout, const numerics::Mlp& encoder, int action_dim,
          numerics::Rng& rng);

  // Trainable tensors (target encoder excluded), in a fixed order.
  std::vector<numerics::Matrix*> trainable();
  void save(numerics::TensorArchive& ar, const std::string& prefix = "aux.") const;
  void load(const numerics::TensorArchive& ar, const std::string& prefix = "aux.");
};

// Gradients of an auxiliary loss. target_encoder exists to make the
// stop-gradient contract checkable: nothing ever writes to it.
struct AuxGrads {
  numerics::ParamSet encoder;
  numerics::ParamSet decoder;
  numerics::ParamSet prop_decoder;
  numerics::ParamSet forward_model;
  numerics::ParamSet projector;
  numerics::ParamSet target_encoder;

  static AuxGrads zeros_like(const numerics::Mlp& encoder, const AuxNets& nets);
  // Same order as encoder tensors followed by AuxNets::trainable().
  std::vector<numerics::Matrix*> trainable(const AuxNets& nets);
  void set_zero();
};

}  // namespace roto::ssl
