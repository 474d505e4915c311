#pragma once

#include <cstdint>
#include <span>

namespace roto::analysis {

struct ConfusionCounts {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;

  int64_t total() const { return tp + fp + tn + fn; }
  // Predictions are positive when prob >= threshold; labels when > 0.5.
  static ConfusionCounts from_arrays(std::span<const double> prob, std::span<const double> label,
                                     double threshold = 0.5);
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// Rates with a zero denominator are NaN.
struct ClassificationMetrics {
  double tpr, fpr, fnr, tnr, accuracy, precision;
};

ClassificationMetrics classification_metrics(const ConfusionCounts& c);

}  // namespace roto::analysis
