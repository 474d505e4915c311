#pragma once

#include <vector>

#include "roto/envs/vec_env.hpp"

namespace roto::testing {

// Five-state chain. The action sign that moves right alternates with the state
// parity (positive in even states, negative in odd ones); anything else moves
// left. Reward 1 for every step that ends in the rightmost state. Fixed-length episodes starting
// in state 0; optimal return is length - 3.
class ChainEnv final : public envs::VecEnv {
 public:
  static constexpr int kStates = 5;

  ChainEnv(int batch, int length) : length_(length), state_(batch, 0), t_(batch, 0) {
    spec_.action_dim = 1;
    spec_.prop_dim = kStates;
    spec_.tact_dim = 0;
    spec_.frame_dim = kStates;
    spec_.history = 1;
    spec_.obs_dim = kStates;
    spec_.episode_length = length;
    spec_.reward_terms = {"goal"};
    spec_.reward_scales = {1.0};
    spec_.use_tactile = false;
    obs_ = numerics::Matrix::Zero(batch, kStates);
    last_.reward.resize(batch, 1);
    last_.terms.resize(batch, 1);
    last_.terminated.assign(static_cast<size_t>(batch), 0);
    last_.truncated.assign(static_cast<size_t>(batch), 0);
    last_.events.resize(static_cast<size_t>(batch));
    write_obs();
  }

  static double optimal_return(int length) { return length - (kStates - 2); }

  const envs::EnvSpec& spec() const override { return spec_; }
  int size() const override { return static_cast<int>(state_.size()); }
  const numerics::Matrix& observations() const override { return obs_; }

  const envs::BatchStep& step(const numerics::Matrix& actions) override {
    for (int i = 0; i < size(); ++i) {
      int& s = state_[static_cast<size_t>(i)];
      const bool right = (s % 2 == 0) == (actions(i, 0) > 0.0);
      s = right ? std::min(s + 1, kStates - 1) : std::max(s - 1, 0);
      last_.reward(i, 0) = s == kStates - 1 ? 1.0 : 0.0;
      last_.terms(i, 0) = last_.reward(i, 0);
      const bool trunc = ++t_[static_cast<size_t>(i)] >= length_;
      last_.truncated[static_cast<size_t>(i)] = trunc ? 1 : 0;
      if (trunc) {
        s = 0;
        t_[static_cast<size_t>(i)] = 0;
      }
    }
    write_obs();
    return last_;
  }

 private:
  void write_obs() {
    obs_.setZero();
    for (int i = 0; i < size(); ++i) obs_(i, state_[static_cast<size_t>(i)]) = 1.0;
  }

  int length_;
  envs::EnvSpec spec_;
  std::vector<int> state_;
  std::vector<int> t_;
  numerics::Matrix obs_;
  envs::BatchStep last_;
};

}  // namespace roto::testing
