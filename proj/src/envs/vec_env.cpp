#include "roto/envs/vec_env.hpp"

#include <algorithm>
#include <stdexcept>

#include "roto/envs/bounce2d.hpp"
#include "roto/envs/find2d.hpp"
#include "roto/envs/orbit2d.hpp"
#include "roto/numerics/parallel.hpp"

namespace roto::envs {

using numerics::Matrix;

std::unique_ptr<Simulator> make_simulator(const EnvConfig& cfg) {
  switch (cfg.env_id) {
    case EnvId::kFind2d: return std::make_unique<Find2d>(cfg);
    case EnvId::kBounce2d: return std::make_unique<Bounce2d>(cfg);
    case EnvId::kOrbit2d: return std::make_unique<Orbit2d>(cfg);
  }
  throw std::invalid_argument("make_simulator: unknown env");
}

BatchEnv::BatchEnv(EnvConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  spec_ = make_spec(cfg_);
  const auto b = static_cast<size_t>(cfg_.batch);
  for (size_t i = 0; i < b; ++i) {
    sims_.push_back(make_simulator(cfg_));
    stacks_.emplace_back(spec_.history, spec_.frame_dim);
  }
  rngs_.resize(b);
  episode_steps_.assign(b, 0);
  traces_.resize(b);
  obs_ = Matrix::Zero(cfg_.batch, spec_.obs_dim);
  last_.prop = Matrix::Zero(cfg_.batch, spec_.prop_dim);
  last_.tact = Matrix::Zero(cfg_.batch, spec_.tact_dim);
  last_.reward = Matrix::Zero(cfg_.batch, 1);
  last_.terms = Matrix::Zero(cfg_.batch, static_cast<Eigen::Index>(spec_.reward_terms.size()));
  last_.ground_truth = Matrix::Zero(cfg_.batch, spec_.gt_dim);
  last_.terminated.assign(b, 0);
  last_.truncated.assign(b, 0);
  last_.events.assign(b, StepEvents{});
  reset_all();
}

void BatchEnv::reset_all() {
  for (int i = 0; i < cfg_.batch; ++i) {
    rngs_[static_cast<size_t>(i)] = numerics::Rng(numerics::mix_seed(cfg_.seed, static_cast<uint64_t>(i)));
    reset_one(i);
    capture_frame(i);
  }
}

void BatchEnv::reset(std::span<const int> indices, std::span<const uint64_t> seeds) {
  if (indices.size() != seeds.size()) throw std::invalid_argument("BatchEnv::reset: indices/seeds size");
  for (size_t k = 0; k < indices.size(); ++k) {
    const int i = indices[k];
    if (i < 0 || i >= cfg_.batch) throw std::out_of_range("BatchEnv::reset: bad env index");
    rngs_[static_cast<size_t>(i)] = numerics::Rng(seeds[k]);
    reset_one(i);
    capture_frame(i);
  }
}

void BatchEnv::write_frame_row(int i, std::vector<double>& frame) const {
  const auto& sim = *sims_[static_cast<size_t>(i)];
  frame.assign(static_cast<size_t>(spec_.frame_dim), 0.0);
  sim.write_prop(std::span<double>(frame.data(), static_cast<size_t>(spec_.prop_dim)));
  if (spec_.use_tactile) {
    sim.write_tact(std::span<double>(frame.data() + spec_.prop_dim, static_cast<size_t>(spec_.tact_dim)));
  }
}

void BatchEnv::refresh_obs_row(int i) {
  stacks_[static_cast<size_t>(i)].flatten(
      std::span<double>(obs_.row(i).data(), static_cast<size_t>(spec_.obs_dim)));
}

void BatchEnv::reset_one(int i) {
  const auto idx = static_cast<size_t>(i);
  sims_[idx]->reset(rngs_[idx]);
  episode_steps_[idx] = 0;
  std::vector<double> frame;
  write_frame_row(i, frame);
  stacks_[idx].flood(frame);
  refresh_obs_row(i);
}

void BatchEnv::capture_frame(int i) {
  const auto idx = static_cast<size_t>(i);
  const auto& sim = *sims_[idx];
  sim.write_prop(std::span<double>(last_.prop.row(i).data(), static_cast<size_t>(spec_.prop_dim)));
  sim.write_tact(std::span<double>(last_.tact.row(i).data(), static_cast<size_t>(spec_.tact_dim)));
  sim.write_ground_truth(
      std::span<double>(last_.ground_truth.row(i).data(), static_cast<size_t>(spec_.gt_dim)));
  last_.terms.row(i).setZero();
  last_.reward(i, 0) = 0.0;
  last_.terminated[idx] = 0;
  last_.truncated[idx] = 0;
  last_.events[idx] = sim.events();
}

const BatchStep& BatchEnv::step(const Matrix& actions) {
  if (actions.rows() != cfg_.batch || actions.cols() != spec_.action_dim) {
    throw std::invalid_argument("BatchEnv::step: actions must be " + std::to_string(cfg_.batch) + "x" +
                                std::to_string(spec_.action_dim) + ", got " +
                                numerics::shape_string(actions));
  }
  if (!actions.allFinite()) throw numerics::NumericError("BatchEnv::step: non-finite action");
  const size_t n_terms = spec_.reward_terms.size();
  numerics::parallel_for(static_cast<size_t>(cfg_.batch), [&](size_t idx) {
    const int i = static_cast<int>(idx);
    auto& sim = *sims_[idx];
    std::vector<double> a(static_cast<size_t>(spec_.action_dim));
    for (int j = 0; j < spec_.action_dim; ++j) a[static_cast<size_t>(j)] = std::clamp(actions(i, j), -1.0, 1.0);
    traces_[idx].clear();
    sim.step(a, trace_on_ ? &traces_[idx] : nullptr);
    episode_steps_[idx] += 1;

    capture_frame(i);
    sim.write_terms(std::span<double>(last_.terms.row(i).data(), n_terms));
    double r = 0.0;
    for (size_t t = 0; t < n_terms; ++t) r += spec_.reward_scales[t] * last_.terms(i, static_cast<Eigen::Index>(t));
    last_.reward(i, 0) = r;
    const bool term = sim.terminated();
    const bool trunc = episode_steps_[idx] >= spec_.episode_length;
    last_.terminated[idx] = term ? 1 : 0;
    last_.truncated[idx] = trunc ? 1 : 0;

    std::vector<double> frame;
    write_frame_row(i, frame);
    stacks_[idx].push(frame);
    if ((term || trunc) && cfg_.auto_reset) {
      reset_one(i);
    } else {
      refresh_obs_row(i);
    }
  });
  total_steps_ += cfg_.batch;
  return last_;
}

nlohmann::ordered_json BatchEnv::save_state() const {
  nlohmann::ordered_json j;
  j["env_id"] = to_string(cfg_.env_id);
  j["total_steps"] = total_steps_;
  auto& envs = j["envs"];
  envs = nlohmann::ordered_json::array();
  for (size_t i = 0; i < sims_.size(); ++i) {
    envs.push_back({{"state", sims_[i]->state()},
                    {"rng", rngs_[i].serialize()},
                    {"episode_step", episode_steps_[i]},
                    {"stack", stacks_[i].ring()},
                    {"stack_head", stacks_[i].head()}});
  }
  return j;
}

void BatchEnv::load_state(const nlohmann::ordered_json& j) {
  if (j.at("env_id").get<std::string>() != to_string(cfg_.env_id)) {
    throw std::runtime_error("BatchEnv::load_state: env mismatch");
  }
  const auto& envs = j.at("envs");
  if (envs.size() != sims_.size()) throw std::runtime_error("BatchEnv::load_state: batch mismatch");
  total_steps_ = j.at("total_steps").get<int64_t>();
  for (size_t i = 0; i < sims_.size(); ++i) {
    const auto& e = envs[i];
    sims_[i]->set_state(e.at("state").get<std::vector<double>>());
    rngs_[i].deserialize(e.at("rng").get<std::string>());
    episode_steps_[i] = e.at("episode_step").get<int>();
    stacks_[i].restore(e.at("stack").get<std::vector<double>>(), e.at("stack_head").get<int>());
    refresh_obs_row(static_cast<int>(i));
    capture_frame(static_cast<int>(i));
  }
}

}  // namespace roto::envs
