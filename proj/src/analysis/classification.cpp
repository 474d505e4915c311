#include "roto/analysis/classification.hpp"

#include <limits>
#include <stdexcept>

namespace roto::analysis {

namespace {

double ratio(int64_t num, int64_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ConfusionCounts ConfusionCounts::from_arrays(std::span<const double> prob, std::span<const double> label,
                                             double threshold) {
  if (prob.size() != label.size()) throw std::invalid_argument("ConfusionCounts: size mismatch");
  ConfusionCounts c;
  for (size_t i = 0; i < prob.size(); ++i) {
    const bool p = prob[i] >= threshold;
    const bool t = label[i] > 0.5;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
  return {ratio(c.tp, c.tp + c.fn), ratio(c.fp, c.fp + c.tn), ratio(c.fn, c.fn + c.tp),
          ratio(c.tn, c.tn + c.fp), ratio(c.tp + c.tn, c.total()), ratio(c.tp, c.tp + c.fp)};
}

}  // namespace roto::analysis
