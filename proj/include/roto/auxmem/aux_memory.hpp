#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "roto/numerics/matrix.hpp"
#include "roto/numerics/rng.hpp"
#include "roto/ppo/rollout.hpp"

namespace roto::auxmem {

using numerics::Matrix;

class NoValidWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Where a sampled window starts: env index, ring slot (0 = oldest) and step.
struct WindowStart {
  int env = 0;
  int slot = 0;
  int t = 0;
  bool operator==(const WindowStart&) const = default;
};

// M windows of H transitions: obs[0..H] and actions[0..H-1], each M rows.
// done[k](j) is the done flag of transition k in window j; always zero for
// windows produced by sampling.
struct SequenceBatch {
  int horizon = 0;
  std::vector<Matrix> obs;
  std::vector<Matrix> actions;
  std::vector<Matrix> done;
  std::vector<WindowStart> starts;

  int size() const { return static_cast<int>(starts.size()); }
};

struct StoredRollout {
  Matrix obs;      // (R*B) x obs_dim, time-major
  Matrix actions;  // (R*B) x A
  std::vector<uint8_t> done;
  Matrix bootstrap_obs;  // B x obs_dim
  bool continues_previous = false;
};

// Ring of the most recent rollouts used as training data for the auxiliary
// objectives. Capacity 1 reproduces sampling from the current rollout only.
class AuxMemory {
 public:
  explicit AuxMemory(int capacity);

  int capacity() const { return capacity_; }
  int stored() const { return static_cast<int>(ring_.size()); }
  int64_t pushes() const { return pushes_; }
  int num_envs() const { return num_envs_; }
  int rollout_length() const { return length_; }
  const StoredRollout& slot(int i) const { return ring_.at(static_cast<size_t>(i)); }
  size_t footprint_bytes() const;

  // Appends a copy of the rollout, evicting the oldest beyond capacity. The
  // seam to the previous rollout is continuous when `contiguous` is true and
  // each env's previous bootstrap observation equals its first new observation.
  void push(const ppo::RolloutBatch& batch, bool contiguous = true);
  void clear();

  // Every valid window of H transitions, env-major then chronological.
  const std::vector<WindowStart>& valid_windows(int horizon) const;
  // Uniform sample (with replacement) of M valid windows.
  SequenceBatch sample(int horizon, int batch_size, numerics::Rng& rng) const;
  // Uniform sample (with replacement) of M stored observations, any step.
  Matrix sample_observations(int batch_size, numerics::Rng& rng) const;
  // Materializes the given windows; throws if any is not valid.
  SequenceBatch gather(int horizon, const std::vector<WindowStart>& starts) const;

  // Restores ring content verbatim (checkpoint resume).
  void restore(std::deque<StoredRollout> ring, int64_t pushes);
  const std::deque<StoredRollout>& ring() const { return ring_; }

 private:
  // Observation following transition (slot, t) for env, or nullptr if the
  // timeline ends there.
  bool locate(int env, int slot, int t, int steps, int& out_slot, int& out_t) const;
  void build_windows(int horizon) const;

  int capacity_;
  int num_envs_ = 0;
  int length_ = 0;
  Eigen::Index obs_dim_ = 0;
  Eigen::Index action_dim_ = 0;
  int64_t pushes_ = 0;
  std::deque<StoredRollout> ring_;
  mutable int cached_horizon_ = 0;
  mutable std::vector<WindowStart> cache_;
};

// Uniform window sampling straight from one rollout, independent of AuxMemory.
SequenceBatch sample_from_rollout(const ppo::RolloutBatch& batch, int horizon, int batch_size,
                                  numerics::Rng& rng);

}  // namespace roto::auxmem
