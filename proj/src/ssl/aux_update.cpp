#include "roto/ssl/aux_update.hpp"

#include <cmath>
#include <sstream>

namespace roto::ssl {

namespace {

std::vector<numerics::Matrix*> trainable_params(agent::Agent& agent, AuxNets& nets) {
  std::vector<numerics::Matrix*> out = agent.encoder().params().tensors();
  for (numerics::Matrix* t : nets.trainable()) out.push_back(t);
  return out;
}

}  // namespace

AuxLearner::AuxLearner(agent::Agent& agent, AuxConfig cfg, ObsLayout layout, uint64_t seed)
    : agent_(agent), cfg_(std::move(cfg)), layout_(layout), rng_(seed) {
  if (!cfg_.enabled()) throw std::invalid_argument("AuxLearner: objective is none");
  cfg_.validate(layout_.tact_dim > 0);
  if (layout_.obs_dim() != agent_.config().obs_dim) {
    throw std::invalid_argument("AuxLearner: observation layout does not match the agent");
  }
  numerics::Rng init(numerics::mix_seed(seed, 1));
  nets_ = AuxNets(cfg_, layout_, agent_.encoder(), agent_.config().action_dim, init);
  grads_ = AuxGrads::zeros_like(agent_.encoder(), nets_);
  adam_ = numerics::AdamState::for_params(trainable_params(agent_, nets_));
}

AuxBatch AuxLearner::sample(const auxmem::AuxMemory& memory, int batch_size) {
  AuxBatch b;
  if (cfg_.uses_sequences()) {
    b.seq = memory.sample(cfg_.horizon, batch_size, rng_);
  } else {
    b.obs = memory.sample_observations(batch_size, rng_);
  }
  return b;
}

AuxStats AuxLearner::step(const AuxBatch& batch) {
  grads_.set_zero();
  const AuxLossTerms l = aux_loss(agent_.encoder(), nets_, cfg_, layout_, batch, &grads_);
  if (!std::isfinite(l.total)) {
    std::ostringstream os;
    os << "aux update (" << to_string(cfg_.objective) << "): non-finite loss (reconstruction="
       << l.reconstruction << ", prop_mse=" << l.prop_mse << ", dynamics=" << l.dynamics
       << ", tactile_forecast=" << l.tactile_forecast << ")";
    throw numerics::NumericError(os.str());
  }
  auto g = grads_.trainable(nets_);
  for (numerics::Matrix* t : g) *t *= cfg_.c_aux;
  AuxStats s;
  s.grad_norm = numerics::global_norm(numerics::const_view(g));
  numerics::adam_step(trainable_params(agent_, nets_), numerics::const_view(g), adam_, cfg_.lr_aux);
  s.loss = l.total;
  s.reconstruction = l.reconstruction;
  s.prop_mse = l.prop_mse;
  s.dynamics = l.dynamics;
  s.tactile_forecast = l.tactile_forecast;
  s.counts = l.counts;
  s.steps = 1;
  return s;
}

void AuxLearner::update_target() {
  if (nets_.has_dynamics) numerics::ema_update(nets_.target_encoder.params(), agent_.encoder().params(), cfg_.tau);
}

AuxStats AuxLearner::update(const auxmem::AuxMemory& memory, int minibatches, int batch_size) {
  AuxStats total;
  for (int k = 0; k < minibatches; ++k) {
    const AuxStats s = step(sample(memory, batch_size));
    total.loss += s.loss;
    total.reconstruction += s.reconstruction;
    total.prop_mse += s.prop_mse;
    total.dynamics += s.dynamics;
    total.tactile_forecast += s.tactile_forecast;
    total.grad_norm += s.grad_norm;
    total.counts.merge(s.counts);
    total.steps += 1;
  }
  if (total.steps > 0) {
    const double k = 1.0 / total.steps;
    total.loss *= k;
    total.reconstruction *= k;
    total.prop_mse *= k;
    total.dynamics *= k;
    total.tactile_forecast *= k;
    total.grad_norm *= k;
  }
  update_target();
  return total;
}

void AuxLearner::save(numerics::TensorArchive& ar) const {
  nets_.save(ar);
  ar.put_adam("aux.adam.", adam_);
  ar.meta()["aux"] = {{"objective", to_string(cfg_.objective)}, {"rng", rng_.serialize()}};
}

void AuxLearner::load(const numerics::TensorArchive& ar) {
  const auto& j = ar.meta().at("aux");
  if (j.at("objective").get<std::string>() != to_string(cfg_.objective)) {
    throw std::invalid_argument("AuxLearner::load: checkpoint objective differs");
  }
  nets_.load(ar);
  ar.get_adam("aux.adam.", adam_);
  rng_.deserialize(j.at("rng").get<std::string>());
}

}  // namespace roto::ssl
