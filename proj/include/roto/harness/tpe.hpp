#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roto/numerics/rng.hpp"

namespace roto::harness {

struct SearchParam {
  enum class Kind { kUniform, kLogUniform, kCategorical };
  std::string name;
  Kind kind = Kind::kUniform;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> choices;  // kCategorical

  static SearchParam uniform(std::string name, double lo, double hi);
  static SearchParam log_uniform(std::string name, double lo, double hi);
  static SearchParam categorical(std::string name, std::vector<double> choices);
  bool contains(double v) const;
};

using SearchSpace = std::vector<SearchParam>;
using Point = std::vector<double>;  // one value per parameter, in space order

struct Trial {
  int id = 0;
  Point x;
  double objective = 0.0;  // maximized
  bool failed = false;
  std::string error;
};

struct TpeOptions {
  int startup = 5;
  double gamma = 0.25;
  int candidates = 24;
  bool random_only = false;
};

// Univariate tree-structured Parzen estimator. Completed trials are split
// into the best ceil(gamma * n) and the rest; each parameter is drawn from
// the good-trial density as the best of `candidates` draws by good/bad
// density ratio. Failed trials do not enter either density.
class TpeSampler {
 public:
  TpeSampler(SearchSpace space, TpeOptions opts, uint64_t seed);

  const SearchSpace& space() const { return space_; }
  Point sample_prior();
  Point suggest(const std::vector<Trial>& history);

 private:
  double suggest_param(size_t p, const std::vector<const Trial*>& good, const std::vector<const Trial*>& bad);

  SearchSpace space_;
  TpeOptions opts_;
  numerics::Rng rng_;
};

// Runs `trials` evaluations of fn, suggested by a TpeSampler. Exceptions
// thrown by fn mark that trial failed and the loop continues.
std::vector<Trial> optimize(const SearchSpace& space, const TpeOptions& opts, int trials, uint64_t seed,
                            const std::function<double(const Point&, int)>& fn);

}  // namespace roto::harness
