#pragma once

#include <string>
#include <vector>

#include "roto/numerics/activation.hpp"
#include "roto/numerics/matrix.hpp"
#include "roto/numerics/rng.hpp"

namespace roto::numerics {

struct MlpSpec {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation hidden_activation = Activation::kElu;
  Activation output_activation = Activation::kIdentity;
  std::vector<bool> layer_norm;  // one flag per linear layer; empty means none

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  bool has_layer_norm(int layer) const;
  Activation activation_at(int layer) const;
  void validate() const;
  bool operator==(const MlpSpec&) const = default;
};

// One affine layer, optionally followed by layer normalization.
// weight is in x out; bias, gain and offset are 1 x out.
struct DenseLayer {
  Matrix weight;
  Matrix bias;
  Matrix gain;
  Matrix offset;
  bool layer_norm = false;
};

struct ParamSet {
  std::vector<DenseLayer> layers;

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  // Stable names such as "l0.weight", used by the archive.
  std::vector<std::string> tensor_names(const std::string& prefix) const;
  void set_zero();
  size_t num_params() const;
  bool all_finite() const;
};

Matrix linear_forward(const DenseLayer& layer, const Matrix& x);

// Forward intermediates for one Mlp::forward call.
class GradTape {
 public:
  struct Layer {
    Matrix input;
    Matrix pre;   // input to the activation
    Matrix post;  // activation output
    LayerNormCache ln;
  };

  bool recorded() const { return !layers_.empty(); }
  bool consumed() const { return consumed_; }
  const Matrix& output() const { return layers_.back().post; }
  // Input to the final activation (logits for a sigmoid output).
  const Matrix& pre_activation() const { return layers_.back().pre; }

 private:
  friend class Mlp;
  std::vector<Layer> layers_;
  bool consumed_ = false;
};

enum class GradWrt {
  kOutput,         // d_out is dL/d(network output)
  kPreActivation,  // d_out is dL/d(final pre-activation), e.g. logits for a sigmoid head
};

class Mlp {
 public:
  Mlp() = default;
  // Uniform(+-1/sqrt(fan_in)) init for weights and biases; the last layer's
  // weights are further multiplied by output_scale.
  Mlp(MlpSpec spec, Rng& rng, double output_scale = 1.0);

  const MlpSpec& spec() const { return spec_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  ParamSet zero_grads() const;

  Matrix forward(const Matrix& x, GradTape* tape = nullptr) const;
  // Accumulates parameter gradients into grads (+=) and returns dL/dx.
  // A tape can be consumed once.
  Matrix backward(GradTape& tape, const Matrix& d_out, ParamSet& grads,
                  GradWrt wrt = GradWrt::kOutput) const;

 private:
  MlpSpec spec_;
  ParamSet params_;
};

}  // namespace roto::numerics
