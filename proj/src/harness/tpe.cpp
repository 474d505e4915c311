#include "roto/harness/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace roto::harness {

namespace {

// Truncated Gaussian mixture on [lo, hi] with equal component weights.
struct Parzen {
  std::vector<double> mu;
  std::vector<double> sigma;
  double lo = 0.0;
  double hi = 1.0;

  static double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

  double log_pdf(double x) const {
    double p = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) {
      const double z = (x - mu[i]) / sigma[i];
      const double mass = cdf((hi - mu[i]) / sigma[i]) - cdf((lo - mu[i]) / sigma[i]);
      p += std::exp(-0.5 * z * z) / (sigma[i] * std::sqrt(2.0 * std::numbers::pi) * std::max(mass, 1e-300));
    }
    return std::log(std::max(p / static_cast<double>(mu.size()), 1e-300));
  }

  double sample(numerics::Rng& rng) const {
    const size_t i = rng.index(mu.size());
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double x = rng.normal(mu[i], sigma[i]);
      if (x >= lo && x <= hi) return x;
    }
    return std::clamp(mu[i], lo, hi);
  }
};

// Components at each observation plus a broad prior component at the middle.
// Bandwidths are the larger gap to a sorted neighbour, clipped to
// [(hi - lo) / min(100, n + 1), hi - lo].
Parzen build_parzen(std::vector<double> obs, double lo, double hi) {
  Parzen pz;
  pz.lo = lo;
  pz.hi = hi;
  const double range = hi - lo;
  obs.push_back(0.5 * (lo + hi));
  const size_t prior = obs.size() - 1;
  std::vector<size_t> order(obs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return obs[a] < obs[b]; });
  const double min_bw = range / std::min(100.0, static_cast<double>(obs.size()));
  pz.mu = obs;
  pz.sigma.assign(obs.size(), range);
  for (size_t k = 0; k < order.size(); ++k) {
    const double x = obs[order[k]];
    const double left = k > 0 ? x - obs[order[k - 1]] : x - lo;
    const double right = k + 1 < order.size() ? obs[order[k + 1]] - x : hi - x;
    pz.sigma[order[k]] = std::clamp(std::max(left, right), min_bw, range);
  }
  pz.sigma[prior] = range;
  return pz;
}

double to_internal(const SearchParam& p, double v) {
  return p.kind == SearchParam::Kind::kLogUniform ? std::log(v) : v;
}

double from_internal(const SearchParam& p, double v) {
  return p.kind == SearchParam::Kind::kLogUniform ? std::exp(v) : v;
}

}  // namespace

SearchParam SearchParam::uniform(std::string name, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("SearchParam " + name + ": empty range");
  return {std::move(name), Kind::kUniform, lo, hi, {}};
}

SearchParam SearchParam::log_uniform(std::string name, double lo, double hi) {
  if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("SearchParam " + name + ": bad log range");
  return {std::move(name), Kind::kLogUniform, lo, hi, {}};
}

SearchParam SearchParam::categorical(std::string name, std::vector<double> choices) {
  if (choices.empty()) throw std::invalid_argument("SearchParam " + name + ": no choices");
  return {std::move(name), Kind::kCategorical, 0.0, 0.0, std::move(choices)};
}

bool SearchParam::contains(double v) const {
  if (kind == Kind::kCategorical) return std::find(choices.begin(), choices.end(), v) != choices.end();
  return v >= lo && v <= hi;
}

TpeSampler::TpeSampler(SearchSpace space, TpeOptions opts, uint64_t seed)
    : space_(std::move(space)), opts_(opts), rng_(seed) {
  if (space_.empty()) throw std::invalid_argument("TpeSampler: empty search space");
  if (opts_.startup < 1 || opts_.candidates < 1 || !(opts_.gamma > 0.0 && opts_.gamma < 1.0)) {
    throw std::invalid_argument("TpeSampler: bad options");
  }
}

Point TpeSampler::sample_prior() {
  Point x;
  for (const SearchParam& p : space_) {
    if (p.kind == SearchParam::Kind::kCategorical) {
      x.push_back(p.choices[rng_.index(p.choices.size())]);
    } else {
      x.push_back(from_internal(p, rng_.uniform(to_internal(p, p.lo), to_internal(p, p.hi))));
    }
  }
  return x;
}

Point TpeSampler::suggest(const std::vector<Trial>& history) {
  std::vector<const Trial*> done;
  for (const Trial& t : history) {
    if (!t.failed) done.push_back(&t);
  }
  if (opts_.random_only || static_cast<int>(history.size()) < opts_.startup || done.size() < 2) {
    return sample_prior();
  }
  std::stable_sort(done.begin(), done.end(), [](const Trial* a, const Trial* b) { return a->objective > b->objective; });
  const size_t n_good = std::max<size_t>(1, static_cast<size_t>(std::ceil(opts_.gamma * static_cast<double>(done.size()))));
  const std::vector<const Trial*> good(done.begin(), done.begin() + static_cast<std::ptrdiff_t>(n_good));
  const std::vector<const Trial*> bad(done.begin() + static_cast<std::ptrdiff_t>(n_good), done.end());
  Point x;
  for (size_t p = 0; p < space_.size(); ++p) x.push_back(suggest_param(p, good, bad));
  return x;
}

double TpeSampler::suggest_param(size_t pi, const std::vector<const Trial*>& good,
                                 const std::vector<const Trial*>& bad) {
  const SearchParam& p = space_[pi];
  if (p.kind == SearchParam::Kind::kCategorical) {
    const size_t k = p.choices.size();
    std::vector<double> wl(k, 1.0), wg(k, 1.0);  // add-one smoothing
    auto index_of = [&](double v) {
      return static_cast<size_t>(std::find(p.choices.begin(), p.choices.end(), v) - p.choices.begin());
    };
    for (const Trial* t : good) {
      const size_t i = index_of(t->x[pi]);
      if (i < k) wl[i] += 1.0;
    }
    for (const Trial* t : bad) {
      const size_t i = index_of(t->x[pi]);
      if (i < k) wg[i] += 1.0;
    }
    double sl = 0.0, sg = 0.0;
    for (size_t i = 0; i < k; ++i) {
      sl += wl[i];
      sg += wg[i];
    }
    size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < opts_.candidates; ++c) {
      double u = rng_.uniform() * sl;
      size_t i = 0;
      while (i + 1 < k && u >= wl[i]) u -= wl[i++];
      const double score = std::log(wl[i] / sl) - std::log(wg[i] / sg);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return p.choices[best];
  }
  const double lo = to_internal(p, p.lo), hi = to_internal(p, p.hi);
  std::vector<double> xl, xg;
  for (const Trial* t : good) xl.push_back(to_internal(p, t->x[pi]));
  for (const Trial* t : bad) xg.push_back(to_internal(p, t->x[pi]));
  const Parzen l = build_parzen(xl, lo, hi);
  const Parzen g = build_parzen(xg, lo, hi);
  double best = l.sample(rng_);
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < opts_.candidates; ++c) {
    const double x = c == 0 ? best : l.sample(rng_);
    const double score = l.log_pdf(x) - g.log_pdf(x);
    if (score > best_score) {
      best_score = score;
      best = x;
    }
  }
  return std::clamp(from_internal(p, best), p.lo, p.hi);
}

std::vector<Trial> optimize(const SearchSpace& space, const TpeOptions& opts, int trials, uint64_t seed,
                            const std::function<double(const Point&, int)>& fn) {
  if (trials < opts.startup) throw std::invalid_argument("optimize: trials must be >= startup trials");
  TpeSampler sampler(space, opts, seed);
  std::vector<Trial> history;
  for (int i = 0; i < trials; ++i) {
    Trial t;
    t.id = i;
    t.x = sampler.suggest(history);
    try {
      t.objective = fn(t.x, i);
      if (!std::isfinite(t.objective)) {
        t.failed = true;
        t.error = "non-finite objective";
      }
    } catch (const std::exception& e) {
      t.failed = true;
      t.error = e.what();
    }
    if (t.failed) t.objective = std::numeric_limits<double>::quiet_NaN();
    history.push_back(std::move(t));
  }
  return history;
}

}  // namespace roto::harness
