#include "roto/envs/observation.hpp"

#include <algorithm>
#include <stdexcept>

namespace roto::envs {

ObservationStack::ObservationStack(int history, int frame_dim)
    : history_(history), frame_dim_(frame_dim),
      data_(static_cast<size_t>(history) * static_cast<size_t>(frame_dim), 0.0) {
  if (history < 1 || frame_dim < 1) throw std::invalid_argument("ObservationStack: bad dimensions");
}

void ObservationStack::flood(std::span<const double> frame) {
  if (static_cast<int>(frame.size()) != frame_dim_) throw std::invalid_argument("flood: frame size");
  for (int k = 0; k < history_; ++k) {
    std::copy(frame.begin(), frame.end(), data_.begin() + static_cast<long>(k) * frame_dim_);
  }
  head_ = 0;
}

void ObservationStack::push(std::span<const double> frame) {
  if (static_cast<int>(frame.size()) != frame_dim_) throw std::invalid_argument("push: frame size");
  // Overwrite the oldest slot; the next slot becomes the oldest.
  std::copy(frame.begin(), frame.end(), data_.begin() + static_cast<long>(head_) * frame_dim_);
  head_ = (head_ + 1) % history_;
}

void ObservationStack::flatten(std::span<double> out) const {
  if (out.size() != data_.size()) throw std::invalid_argument("flatten: output size");
  for (int k = 0; k < history_; ++k) {
    const int slot = (head_ + k) % history_;
    std::copy_n(data_.begin() + static_cast<long>(slot) * frame_dim_, frame_dim_,
                out.begin() + static_cast<long>(k) * frame_dim_);
  }
}

void ObservationStack::restore(std::vector<double> data, int head) {
  if (data.size() != data_.size() || head < 0 || head >= history_) {
    throw std::invalid_argument("ObservationStack::restore: shape mismatch");
  }
  data_ = std::move(data);
  head_ = head;
}

}  // namespace roto::envs
