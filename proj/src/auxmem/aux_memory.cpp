#include "roto/auxmem/aux_memory.hpp"

#include <sstream>

namespace roto::auxmem {

namespace {

SequenceBatch empty_batch(int horizon, int m, Eigen::Index obs_dim, Eigen::Index action_dim) {
  SequenceBatch s;
  s.horizon = horizon;
  s.obs.assign(static_cast<size_t>(horizon) + 1, Matrix(m, obs_dim));
  s.actions.assign(static_cast<size_t>(horizon), Matrix(m, action_dim));
  s.done.assign(static_cast<size_t>(horizon), Matrix::Zero(m, 1));
  s.starts.reserve(static_cast<size_t>(m));
  return s;
}

}  // namespace

AuxMemory::AuxMemory(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("AuxMemory: capacity must be >= 1");
}

size_t AuxMemory::footprint_bytes() const {
  size_t bytes = 0;
  for (const auto& r : ring_) {
    bytes += sizeof(double) * static_cast<size_t>(r.obs.size() + r.actions.size() + r.bootstrap_obs.size());
    bytes += r.done.size();
  }
  return bytes;
}

void AuxMemory::push(const ppo::RolloutBatch& batch, bool contiguous) {
  batch.validate();
  if (!ring_.empty() && (batch.num_envs != num_envs_ || batch.length != length_ ||
                         batch.obs.cols() != obs_dim_ || batch.actions.cols() != action_dim_)) {
    std::ostringstream os;
    os << "AuxMemory::push: rollout shape B=" << batch.num_envs << " R=" << batch.length
       << " obs=" << batch.obs.cols() << " act=" << batch.actions.cols() << " does not match stored B="
       << num_envs_ << " R=" << length_ << " obs=" << obs_dim_ << " act=" << action_dim_;
    throw std::invalid_argument(os.str());
  }
  num_envs_ = batch.num_envs;
  length_ = batch.length;
  obs_dim_ = batch.obs.cols();
  action_dim_ = batch.actions.cols();

  StoredRollout r;
  r.obs = batch.obs;
  r.actions = batch.actions;
  r.done.resize(static_cast<size_t>(batch.rows()));
  for (int i = 0; i < batch.rows(); ++i) r.done[static_cast<size_t>(i)] = batch.done(i) ? 1 : 0;
  r.bootstrap_obs = batch.bootstrap_obs;
  r.continues_previous =
      contiguous && !ring_.empty() && ring_.back().bootstrap_obs == batch.obs.topRows(batch.num_envs);
  ring_.push_back(std::move(r));
  if (static_cast<int>(ring_.size()) > capacity_) {
    ring_.pop_front();
    ring_.front().continues_previous = false;
  }
  ++pushes_;
  cached_horizon_ = 0;
}

void AuxMemory::clear() {
  ring_.clear();
  cached_horizon_ = 0;
}

void AuxMemory::restore(std::deque<StoredRollout> ring, int64_t pushes) {
  if (static_cast<int>(ring.size()) > capacity_) throw std::invalid_argument("AuxMemory::restore: over capacity");
  ring_ = std::move(ring);
  pushes_ = pushes;
  cached_horizon_ = 0;
  if (!ring_.empty()) {
    const auto& r = ring_.front();
    num_envs_ = static_cast<int>(r.bootstrap_obs.rows());
    length_ = num_envs_ > 0 ? static_cast<int>(r.obs.rows()) / num_envs_ : 0;
    obs_dim_ = r.obs.cols();
    action_dim_ = r.actions.cols();
  }
}

bool AuxMemory::locate(int /*env*/, int slot, int t, int steps, int& out_slot, int& out_t) const {
  out_slot = slot;
  out_t = t + steps;
  while (out_t >= length_) {
    if (out_t == length_ && out_slot + 1 == stored()) return true;  // bootstrap observation
    if (out_slot + 1 >= stored() || !ring_[static_cast<size_t>(out_slot) + 1].continues_previous) {
      return out_t == length_;  // the slot's own bootstrap observation
    }
    out_t -= length_;
    ++out_slot;
  }
  return true;
}

void AuxMemory::build_windows(int horizon) const {
  cache_.clear();
  cached_horizon_ = horizon;
  const int n = stored();
  for (int env = 0; env < num_envs_; ++env) {
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < length_; ++t) {
        bool ok = true;
        for (int k = 0; k < horizon && ok; ++k) {
          int ss, tt;
          if (!locate(env, s, t, k, ss, tt) || tt >= length_) {
            ok = false;
            break;
          }
          if (ring_[static_cast<size_t>(ss)].done[static_cast<size_t>(tt * num_envs_ + env)]) ok = false;
        }
        int ss, tt;
        if (ok && locate(env, s, t, horizon, ss, tt)) cache_.push_back({env, s, t});
      }
    }
  }
}

const std::vector<WindowStart>& AuxMemory::valid_windows(int horizon) const {
  if (horizon < 1) throw std::invalid_argument("AuxMemory: horizon must be >= 1");
  if (cached_horizon_ != horizon) build_windows(horizon);
  return cache_;
}

SequenceBatch AuxMemory::gather(int horizon, const std::vector<WindowStart>& starts) const {
  SequenceBatch out = empty_batch(horizon, static_cast<int>(starts.size()), obs_dim_, action_dim_);
  for (size_t j = 0; j < starts.size(); ++j) {
    const WindowStart& w = starts[j];
    const auto row = static_cast<Eigen::Index>(j);
    for (int k = 0; k <= horizon; ++k) {
      int s, t;
      if (!locate(w.env, w.slot, w.t, k, s, t)) throw std::invalid_argument("AuxMemory::gather: window leaves memory");
      const StoredRollout& r = ring_[static_cast<size_t>(s)];
      if (t == length_) {
        if (k < horizon) throw std::invalid_argument("AuxMemory::gather: window crosses a broken seam");
        out.obs[static_cast<size_t>(k)].row(row) = r.bootstrap_obs.row(w.env);
        continue;
      }
      const auto idx = static_cast<Eigen::Index>(t) * num_envs_ + w.env;
      out.obs[static_cast<size_t>(k)].row(row) = r.obs.row(idx);
      if (k < horizon) {
        out.actions[static_cast<size_t>(k)].row(row) = r.actions.row(idx);
        out.done[static_cast<size_t>(k)](row, 0) = r.done[static_cast<size_t>(idx)];
        if (r.done[static_cast<size_t>(idx)]) throw std::invalid_argument("AuxMemory::gather: window spans a done");
      }
    }
    out.starts.push_back(w);
  }
  return out;
}

SequenceBatch AuxMemory::sample(int horizon, int batch_size, numerics::Rng& rng) const {
  if (ring_.empty()) throw NoValidWindowError("AuxMemory::sample: memory is empty");
  const auto& valid = valid_windows(horizon);
  if (valid.empty()) {
    std::ostringstream os;
    os << "AuxMemory::sample: no valid window of " << horizon << " transitions in " << stored()
       << " stored rollout(s) of length " << length_;
    throw NoValidWindowError(os.str());
  }
  std::vector<WindowStart> starts(static_cast<size_t>(batch_size));
  for (auto& s : starts) s = valid[rng.index(valid.size())];
  return gather(horizon, starts);
}

Matrix AuxMemory::sample_observations(int batch_size, numerics::Rng& rng) const {
  if (ring_.empty()) throw NoValidWindowError("AuxMemory::sample_observations: memory is empty");
  const uint64_t per_slot = static_cast<uint64_t>(num_envs_) * static_cast<uint64_t>(length_);
  Matrix out(batch_size, obs_dim_);
  for (int j = 0; j < batch_size; ++j) {
    const uint64_t k = rng.index(per_slot * ring_.size());
    out.row(j) = ring_[k / per_slot].obs.row(static_cast<Eigen::Index>(k % per_slot));
  }
  return out;
}

SequenceBatch sample_from_rollout(const ppo::RolloutBatch& batch, int horizon, int batch_size,
                                  numerics::Rng& rng) {
  batch.validate();
  const int b = batch.num_envs, r = batch.length;
  std::vector<WindowStart> valid;
  for (int env = 0; env < b; ++env) {
    for (int t = 0; t + horizon <= r; ++t) {
      bool ok = true;
      for (int k = 0; k < horizon; ++k) ok = ok && !batch.done(ppo::RolloutBatch::row(t + k, env, b));
      if (ok) valid.push_back({env, 0, t});
    }
  }
  if (valid.empty()) throw NoValidWindowError("sample_from_rollout: no valid window");
  SequenceBatch out = empty_batch(horizon, batch_size, batch.obs.cols(), batch.actions.cols());
  for (int j = 0; j < batch_size; ++j) {
    const WindowStart w = valid[rng.index(valid.size())];
    for (int k = 0; k <= horizon; ++k) {
      const int t = w.t + k;
      out.obs[static_cast<size_t>(k)].row(j) =
          t == r ? batch.bootstrap_obs.row(w.env) : batch.obs.row(ppo::RolloutBatch::row(t, w.env, b));
      if (k < horizon) out.actions[static_cast<size_t>(k)].row(j) = batch.actions.row(ppo::RolloutBatch::row(t, w.env, b));
    }
    out.starts.push_back(w);
  }
  return out;
}

}  // namespace roto::auxmem
