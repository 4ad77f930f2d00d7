#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "scout/model.hpp"

namespace scout {

struct SamplerConfig {
  int n_live = 100;
  double termination_frac = 1e-3;
  int walk_steps = 20;
  int walk_retries = 10;
  long max_iterations = 200000;  // hard stop for pathological likelihoods

  bool valid() const {
    return n_live >= 10 && termination_frac > 0.0 && termination_frac < 1.0 &&
           walk_steps >= 1 && walk_retries >= 1 && max_iterations >= 1;
  }
};

struct LivePoint {
  Circle circle;
  double log_l = 0.0;
};

// log_weight is the normalized posterior log-weight: within a completed run
// the weights sum to 1.
struct WeightedSample {
  Circle circle;
  double log_l = 0.0;
  double log_weight = 0.0;
};

struct NestedRun {
  std::vector<WeightedSample> samples;
  double log_z = 0.0;
  double log_z_err = 0.0;
  double info_h = 0.0;
  int n_live = 0;
  long n_iterations = 0;
  std::uint64_t seed = 0;
};

struct PosteriorEnsemble {
  std::vector<Circle> circles;
  std::uint64_t source_seed = 0;

  std::size_t size() const { return circles.size(); }
};

struct ParameterSummary {
  double mean_x0 = 0.0, std_x0 = 0.0;
  double mean_y0 = 0.0, std_y0 = 0.0;
  double mean_r = 0.0, std_r = 0.0;
};

class ExplorationStalled : public std::runtime_error {
 public:
  ExplorationStalled(long iteration, int proposals)
      : std::runtime_error("nested sampling: constrained walk stalled at iteration " +
                           std::to_string(iteration) + " after " +
                           std::to_string(proposals) + " proposals"),
        iteration_(iteration),
        proposals_(proposals) {}
  long iteration() const { return iteration_; }
  int proposals() const { return proposals_; }

 private:
  long iteration_;
  int proposals_;
};

class DegenerateWeights : public std::runtime_error {
 public:
  explicit DegenerateWeights(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline double logsumexp2(double a, double b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (a == -inf) return b;
  if (b == -inf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Metropolis random walk constrained to log_l > floor and the prior support.
// Starts from a uniformly chosen live point that already satisfies the
// constraint strictly — with a piecewise-constant likelihood many survivors
// can be tied *at* the floor, and those are not inside the constrained
// region. Per-coordinate step widths share one scale factor adapted toward
// ~50% acceptance, persisted across calls. Throws ExplorationStalled if no
// in-constraint point can be produced within the proposal budget (defensively
// — the caller's plateau handling guarantees a valid start exists).
template <class LogL>
LivePoint constrained_walk(const LogL& log_l, const PriorSupport& support,
                           const std::vector<LivePoint>& live, double floor,
                           double& scale, const SamplerConfig& cfg, long iteration,
                           Rng& rng) {
  const double base_x = 0.1 * support.field.width();
  const double base_y = 0.1 * support.field.height();
  const double base_r = 0.1 * (support.r_max - support.r_min);

  std::vector<int> starts;
  starts.reserve(live.size());
  for (int i = 0; i < static_cast<int>(live.size()); ++i)
    if (live[static_cast<std::size_t>(i)].log_l > floor) starts.push_back(i);
  if (starts.empty()) throw ExplorationStalled(iteration, 0);

  int proposals = 0;
  for (int attempt = 0; attempt < cfg.walk_retries; ++attempt) {
    const int start = starts[static_cast<std::size_t>(rng() % starts.size())];
    LivePoint cur = live[static_cast<std::size_t>(start)];

    int accepts = 0;
    int rejects = 0;
    for (int step = 0; step < cfg.walk_steps; ++step) {
      ++proposals;
      Circle prop;
      prop.x0 = cur.circle.x0 + scale * base_x * uniform_real(rng, -1.0, 1.0);
      prop.y0 = cur.circle.y0 + scale * base_y * uniform_real(rng, -1.0, 1.0);
      prop.r = cur.circle.r + scale * base_r * uniform_real(rng, -1.0, 1.0);

      bool accepted = false;
      if (support.admits(prop)) {
        const double ll = log_l(prop);
        if (ll > floor) {
          cur = {prop, ll};
          accepted = true;
        }
      }
      if (accepted) {
        ++accepts;
        scale *= std::exp(1.0 / accepts);
      } else {
        ++rejects;
        scale *= std::exp(-1.0 / rejects);
      }
      scale = std::clamp(scale, 1e-8, 1e2);
    }
    if (cur.log_l > floor) return cur;
  }
  throw ExplorationStalled(iteration, proposals);
}

}  // namespace detail

/// Nested sampling over an arbitrary log-likelihood on the circle prior.
/// Prior-mass shrinkage uses deterministic expectations: points tied at the
/// current floor are removed as one batch of size m with X -> X*(n-m)/n, each
/// carrying weight (X/n)*L, exact for likelihood plateaus and equal to the
/// usual trapezoid weight in the continuous limit.
template <class LogL>
NestedRun run_nested_with(const LogL& log_l, const PriorSupport& support,
                          const SamplerConfig& cfg, std::uint64_t seed) {
  if (!cfg.valid()) throw std::invalid_argument("run_nested: invalid sampler config");
  if (!support.valid()) throw std::invalid_argument("run_nested: invalid prior support");

  const double inf = std::numeric_limits<double>::infinity();
  Rng init_rng = child_rng({seed, kStreamNestedInit});
  Rng walk_rng = child_rng({seed, kStreamNestedWalk});

  const int n = cfg.n_live;
  std::vector<LivePoint> live(static_cast<std::size_t>(n));
  for (LivePoint& lp : live) {
    lp.circle = sample_prior(support, init_rng);
    lp.log_l = log_l(lp.circle);
  }

  const double log_term = std::log(cfg.termination_frac);

  NestedRun run;
  run.n_live = n;
  run.seed = seed;
  run.log_z = -inf;

  // This likelihood family is piecewise constant (one value per inside/outside
  // pattern of the dataset), so the live set routinely holds exact ties at the
  // current floor.  Discarding tied points one at a time with geometric 1/n
  // shrinkage overestimates the mass left after crossing a plateau (e^-a vs
  // the true 1-a for plateau mass fraction a); removing the whole tie batch at
  // once with linear shrinkage X -> X*(n-m)/n keeps the mass estimate honest.
  // Each removed point then carries exactly mass X/n at its own likelihood,
  // which coincides with the usual trapezoid weight in the continuous limit.
  double scale = 1.0;
  long k = 0;
  double log_mass = 0.0;  // log of the constrained region's prior mass X
  while (true) {
    double floor = live[0].log_l;
    double max_l = live[0].log_l;
    for (const LivePoint& lp : live) {
      floor = std::min(floor, lp.log_l);
      max_l = std::max(max_l, lp.log_l);
    }

    const double lw_each = floor + log_mass - std::log(static_cast<double>(n));
    std::vector<LivePoint> survivors;
    survivors.reserve(static_cast<std::size_t>(n));
    int m = 0;
    for (const LivePoint& lp : live) {
      if (lp.log_l == floor) {
        ++m;
        run.samples.push_back({lp.circle, lp.log_l, lw_each});
        run.log_z = detail::logsumexp2(run.log_z, lw_each);
      } else {
        survivors.push_back(lp);
      }
    }
    ++k;

    if (survivors.empty()) {
      // The whole live set sat on one plateau; its mass is fully accounted.
      live.clear();
      log_mass = -inf;
      break;
    }
    log_mass += std::log1p(-static_cast<double>(m) / n);

    // Refill to n live points with draws strictly above the floor.  Every
    // survivor (and every fresh replacement) is a valid walk start.
    while (static_cast<int>(survivors.size()) < n) {
      survivors.push_back(
          detail::constrained_walk(log_l, support, survivors, floor, scale, cfg, k, walk_rng));
    }
    live.swap(survivors);

    if (max_l + log_mass - run.log_z < log_term) break;
    if (k >= cfg.max_iterations) break;
  }

  // Sweep: the remaining live points share the leftover prior mass equally.
  // Ascending order keeps the recorded log_l sequence non-decreasing.
  if (!live.empty()) {
    std::stable_sort(live.begin(), live.end(),
                     [](const LivePoint& a, const LivePoint& b) { return a.log_l < b.log_l; });
    const double log_share = log_mass - std::log(static_cast<double>(live.size()));
    for (const LivePoint& lp : live) {
      const double lw = lp.log_l + log_share;
      run.samples.push_back({lp.circle, lp.log_l, lw});
      run.log_z = detail::logsumexp2(run.log_z, lw);
    }
  }
  run.n_iterations = k;

  // Information H = sum p_i log L_i - log Z, then normalize the weights.
  double h = 0.0;
  for (WeightedSample& ws : run.samples) {
    ws.log_weight -= run.log_z;
    const double p = std::exp(ws.log_weight);
    if (p > 0.0 && std::isfinite(ws.log_l)) h += p * ws.log_l;
  }
  h -= run.log_z;
  run.info_h = std::max(h, 0.0);
  run.log_z_err = std::sqrt(run.info_h / n);
  return run;
}

/// Nested sampling for the circle model over a measured dataset.
inline NestedRun run_nested(const Dataset& data, const SensorResponse& s,
                            const PriorSupport& support, const SamplerConfig& cfg,
                            std::uint64_t seed) {
  if (!s.valid()) throw std::invalid_argument("run_nested: invalid sensor response");
  return run_nested_with(
      [&](const Circle& c) { return log_likelihood(c, s, data); }, support, cfg, seed);
}

/// Systematic (low-variance) resampling proportional to the normalized
/// weights; output order is randomized.
inline PosteriorEnsemble resample_ensemble(const NestedRun& run, int size,
                                           std::uint64_t seed) {
  if (size < 2) throw std::invalid_argument("resample_ensemble: size must be >= 2");
  if (run.samples.empty()) throw std::invalid_argument("resample_ensemble: empty run");

  double total = 0.0;
  for (const WeightedSample& ws : run.samples) {
    const double w = std::exp(ws.log_weight);
    if (!std::isfinite(w)) throw DegenerateWeights("resample_ensemble: non-finite weight");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw DegenerateWeights("resample_ensemble: weights sum to zero");

  Rng rng = child_rng({seed, kStreamResample});
  // u in (0, 1] keeps the equal-weight case at exactly one copy per sample.
  const double u = 1.0 - uniform_real(rng, 0.0, 1.0);

  PosteriorEnsemble ensemble;
  ensemble.source_seed = seed;
  ensemble.circles.reserve(static_cast<std::size_t>(size));
  std::size_t i = 0;
  double cum = std::exp(run.samples[0].log_weight);
  for (int j = 0; j < size; ++j) {
    const double p = total * (static_cast<double>(j) + u) / size;
    while (cum < p && i + 1 < run.samples.size()) {
      ++i;
      cum += std::exp(run.samples[i].log_weight);
    }
    ensemble.circles.push_back(run.samples[i].circle);
  }
  std::shuffle(ensemble.circles.begin(), ensemble.circles.end(), rng);
  return ensemble;
}

/// Per-parameter sample mean and population standard deviation.
inline ParameterSummary summarize(const PosteriorEnsemble& e) {
  if (e.circles.empty()) throw std::invalid_argument("summarize: empty ensemble");
  const double n = static_cast<double>(e.circles.size());
  ParameterSummary s;
  for (const Circle& c : e.circles) {
    s.mean_x0 += c.x0;
    s.mean_y0 += c.y0;
    s.mean_r += c.r;
  }
  s.mean_x0 /= n;
  s.mean_y0 /= n;
  s.mean_r /= n;
  for (const Circle& c : e.circles) {
    s.std_x0 += (c.x0 - s.mean_x0) * (c.x0 - s.mean_x0);
    s.std_y0 += (c.y0 - s.mean_y0) * (c.y0 - s.mean_y0);
    s.std_r += (c.r - s.mean_r) * (c.r - s.mean_r);
  }
  s.std_x0 = std::sqrt(s.std_x0 / n);
  s.std_y0 = std::sqrt(s.std_y0 / n);
  s.std_r = std::sqrt(s.std_r / n);
  return s;
}

}  // namespace scout
