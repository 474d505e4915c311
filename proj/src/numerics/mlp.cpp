#include "roto/numerics/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace roto::numerics {

bool MlpSpec::has_layer_norm(int layer) const {
  return !layer_norm.empty() && layer_norm.at(static_cast<size_t>(layer));
}

Activation MlpSpec::activation_at(int layer) const {
  return layer == num_layers() - 1 ? output_activation : hidden_activation;
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("MlpSpec: need at least 2 layer sizes");
  for (int s : layer_sizes) {
    if (s <= 0) throw std::invalid_argument("MlpSpec: layer sizes must be positive");
  }
  if (!layer_norm.empty() && static_cast<int>(layer_norm.size()) != num_layers()) {
    throw std::invalid_argument("MlpSpec: layer_norm needs one flag per linear layer");
  }
}

std::vector<Matrix*> ParamSet::tensors() {
  std::vector<Matrix*> out;
  for (auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
    if (l.layer_norm) {
      out.push_back(&l.gain);
      out.push_back(&l.offset);
    }
  }
  return out;
}

std::vector<const Matrix*> ParamSet::tensors() const {
  std::vector<const Matrix*> out;
  for (const auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
    if (l.layer_norm) {
      out.push_back(&l.gain);
      out.push_back(&l.offset);
    }
  }
  return out;
}

std::vector<std::string> ParamSet::tensor_names(const std::string& prefix) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < layers.size(); ++i) {
    const std::string base = prefix + "l" + std::to_string(i) + ".";
    out.push_back(base + "weight");
    out.push_back(base + "bias");
    if (layers[i].layer_norm) {
      out.push_back(base + "gain");
      out.push_back(base + "offset");
    }
  }
  return out;
}

void ParamSet::set_zero() {
  for (Matrix* t : tensors()) t->setZero();
}

size_t ParamSet::num_params() const {
  size_t n = 0;
  for (const Matrix* t : tensors()) n += static_cast<size_t>(t->size());
  return n;
}

bool ParamSet::all_finite() const {
  for (const Matrix* t : tensors()) {
    if (!t->allFinite()) return false;
  }
  return true;
}

Matrix linear_forward(const DenseLayer& layer, const Matrix& x) {
  if (x.cols() != layer.weight.rows()) {
    throw std::invalid_argument("linear_forward: input " + shape_string(x) + " vs weight " +
                                shape_string(layer.weight));
  }
  Matrix y = x * layer.weight;
  y.rowwise() += layer.bias.row(0);
  return y;
}

Mlp::Mlp(MlpSpec spec, Rng& rng, double output_scale) : spec_(std::move(spec)) {
  spec_.validate();
  for (int i = 0; i < spec_.num_layers(); ++i) {
    const int in = spec_.layer_sizes[static_cast<size_t>(i)];
    const int out = spec_.layer_sizes[static_cast<size_t>(i) + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const double wscale = (i == spec_.num_layers() - 1) ? output_scale : 1.0;
    DenseLayer l;
    l.weight.resize(in, out);
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) {
      l.weight.data()[k] = wscale * rng.uniform(-bound, bound);
    }
    l.bias.resize(1, out);
    for (Eigen::Index k = 0; k < out; ++k) l.bias(0, k) = rng.uniform(-bound, bound);
    l.layer_norm = spec_.has_layer_norm(i);
    if (l.layer_norm) {
      l.gain = Matrix::Ones(1, out);
      l.offset = Matrix::Zero(1, out);
    }
    params_.layers.push_back(std::move(l));
  }
}

ParamSet Mlp::zero_grads() const {
  ParamSet g = params_;
  g.set_zero();
  return g;
}

Matrix Mlp::forward(const Matrix& x, GradTape* tape) const {
  if (x.cols() != spec_.input_dim()) {
    throw std::invalid_argument("Mlp::forward: expected " + std::to_string(spec_.input_dim()) +
                                " columns, got " + std::to_string(x.cols()));
  }
  if (tape) {
    tape->layers_.clear();
    tape->consumed_ = false;
  }
  Matrix h = x;
  for (int i = 0; i < spec_.num_layers(); ++i) {
    const DenseLayer& l = params_.layers[static_cast<size_t>(i)];
    GradTape::Layer* rec = nullptr;
    if (tape) {
      tape->layers_.emplace_back();
      rec = &tape->layers_.back();
      rec->input = h;
    }
    Matrix pre = linear_forward(l, h);
    if (l.layer_norm) pre = layer_norm(pre, l.gain, l.offset, rec ? &rec->ln : nullptr);
    h = activation(spec_.activation_at(i), pre);
    if (rec) {
      rec->pre = std::move(pre);
      rec->post = h;
    }
  }
  return h;
}

Matrix Mlp::backward(GradTape& tape, const Matrix& d_out, ParamSet& grads, GradWrt wrt) const {
  if (!tape.recorded()) throw std::logic_error("Mlp::backward: tape has no recorded forward");
  if (tape.consumed_) throw std::logic_error("Mlp::backward: tape already consumed");
  if (static_cast<int>(tape.layers_.size()) != spec_.num_layers() ||
      grads.layers.size() != params_.layers.size()) {
    throw std::invalid_argument("Mlp::backward: tape/grads do not match this network");
  }
  tape.consumed_ = true;
  require_same_shape(d_out, tape.output(), "Mlp::backward");
  Matrix d = d_out;
  for (int i = spec_.num_layers() - 1; i >= 0; --i) {
    const auto& rec = tape.layers_[static_cast<size_t>(i)];
    const DenseLayer& l = params_.layers[static_cast<size_t>(i)];
    DenseLayer& g = grads.layers[static_cast<size_t>(i)];
    const bool skip_act = (i == spec_.num_layers() - 1) && wrt == GradWrt::kPreActivation;
    if (!skip_act) d = activation_backward(spec_.activation_at(i), rec.pre, rec.post, d);
    if (l.layer_norm) d = layer_norm_backward(rec.ln, l.gain, d, g.gain, g.offset);
    g.weight.noalias() += rec.input.transpose() * d;
    g.bias += d.colwise().sum();
    d = d * l.weight.transpose();
  }
  return d;
}

}  // namespace roto::numerics
