#pragma once

#include <span>
#include <vector>

namespace roto::envs {

// Ring of the last k frames. flatten() writes them oldest-first.
class ObservationStack {
 public:
  ObservationStack() = default;
  ObservationStack(int history, int frame_dim);

  // Fill every slot with the same frame (used on reset).
  void flood(std::span<const double> frame);
  void push(std::span<const double> frame);
  void flatten(std::span<double> out) const;

  int history() const { return history_; }
  int frame_dim() const { return frame_dim_; }

  std::vector<double> ring() const { return data_; }
  int head() const { return head_; }
  void restore(std::vector<double> data, int head);

 private:
  int history_ = 0;
  int frame_dim_ = 0;
  int head_ = 0;  // slot of the oldest frame
  std::vector<double> data_;
};

}  // namespace roto::envs
