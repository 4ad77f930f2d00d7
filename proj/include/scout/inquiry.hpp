#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "scout/model.hpp"
#include "scout/nested.hpp"

namespace scout {

struct InquiryConfig {
  double grid_spacing = 1.0;
  int n_bins = 32;
  int k_per_model = 5;  // predictive draws per ensemble member

  bool valid() const { return grid_spacing > 0.0 && n_bins >= 1 && k_per_model >= 1; }
};

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
  int col = 0;  // lattice cell indices, useful for rasterizing the map
  int row = 0;
};

// Candidate measurement sites: a regular lattice shifted by one shared
// sub-spacing jitter, clipped to the field.
struct CandidateGrid {
  std::vector<GridPoint> points;
  double spacing = 1.0;
  double jitter_dx = 0.0;  // |jitter| <= spacing/2
  double jitter_dy = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

class EmptyGrid : public std::runtime_error {
 public:
  explicit EmptyGrid(const std::string& what) : std::runtime_error(what) {}
};

/// Lattice with cell centers at (x_min + (i + 0.5 + jx/s) s, ...), clipped to
/// the field. One border cell on each side is scanned because the shift can
/// move it inside. The lattice-rectangle intersection keeps whole rows and
/// columns, so surviving (col, row) pairs always form a full rectangle.
inline CandidateGrid make_grid(const FieldBounds& field, double spacing, double jitter_dx,
                               double jitter_dy) {
  if (!field.valid()) throw std::invalid_argument("make_grid: invalid field");
  if (!(spacing > 0.0)) throw std::invalid_argument("make_grid: spacing must be > 0");
  if (spacing >= std::min(field.width(), field.height()))
    throw EmptyGrid("make_grid: spacing " + std::to_string(spacing) +
                    " too large for the field");

  const int cols = static_cast<int>(std::ceil(field.width() / spacing));
  const int rows = static_cast<int>(std::ceil(field.height() / spacing));

  CandidateGrid grid;
  grid.spacing = spacing;
  grid.jitter_dx = jitter_dx;
  grid.jitter_dy = jitter_dy;
  for (int j = -1; j <= rows; ++j) {
    const double y = field.y_min + (j + 0.5) * spacing + jitter_dy;
    if (y < field.y_min || y > field.y_max) continue;
    for (int i = -1; i <= cols; ++i) {
      const double x = field.x_min + (i + 0.5) * spacing + jitter_dx;
      if (x < field.x_min || x > field.x_max) continue;
      grid.points.push_back({x, y, i, j});
    }
  }
  if (grid.points.empty()) throw EmptyGrid("make_grid: no lattice point fell inside the field");
  return grid;
}

/// Fresh candidate grid whose shared jitter is drawn uniformly from
/// [-spacing/2, spacing/2] in each axis.
inline CandidateGrid build_jittered_grid(const FieldBounds& field, double spacing,
                                         std::uint64_t seed) {
  Rng rng = child_rng({seed, kStreamGridJitter});
  const double dx = uniform_real(rng, -0.5 * spacing, 0.5 * spacing);
  const double dy = uniform_real(rng, -0.5 * spacing, 0.5 * spacing);
  CandidateGrid grid = make_grid(field, spacing, dx, dy);
  grid.seed = seed;
  return grid;
}

/// Monte Carlo draws from the posterior-predictive light level at (x, y):
/// k draws per ensemble member, each N(level(circle), sigma).
inline std::vector<double> predictive_draws(const PosteriorEnsemble& ensemble,
                                            const SensorResponse& s, double x, double y,
                                            int k_per_model, Rng& rng) {
  if (ensemble.circles.empty())
    throw std::invalid_argument("predictive_draws: empty ensemble");
  if (k_per_model < 1) throw std::invalid_argument("predictive_draws: k_per_model < 1");
  std::vector<double> draws;
  draws.reserve(ensemble.circles.size() * static_cast<std::size_t>(k_per_model));
  for (const Circle& c : ensemble.circles) {
    const double mean = contains_point(c, x, y) ? s.white_level : s.black_level;
    for (int k = 0; k < k_per_model; ++k) draws.push_back(normal_draw(rng, mean, s.sigma));
  }
  return draws;
}

/// Plug-in entropy (nats) of an equal-width histogram over [lo, hi]. Values
/// outside the range are clamped into the end bins. A degenerate range
/// occupies a single bin: entropy 0.
inline double histogram_entropy(const std::vector<double>& draws, int n_bins, double lo,
                                double hi) {
  if (draws.empty()) throw std::invalid_argument("histogram_entropy: no draws");
  if (n_bins < 1) throw std::invalid_argument("histogram_entropy: n_bins < 1");
  if (!(hi > lo)) return 0.0;

  std::vector<long> counts(static_cast<std::size_t>(n_bins), 0);
  const double inv_width = n_bins / (hi - lo);
  for (double d : draws) {
    int b = static_cast<int>((d - lo) * inv_width);
    b = std::clamp(b, 0, n_bins - 1);  // d == hi lands in the top bin
    ++counts[static_cast<std::size_t>(b)];
  }
  const double n = static_cast<double>(draws.size());
  double h = 0.0;
  for (long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

/// Histogram entropy with bins spanning [min, max] of the values themselves.
inline double histogram_entropy(const std::vector<double>& draws, int n_bins) {
  if (draws.empty()) throw std::invalid_argument("histogram_entropy: no draws");
  const auto [lo_it, hi_it] = std::minmax_element(draws.begin(), draws.end());
  return histogram_entropy(draws, n_bins, *lo_it, *hi_it);
}

struct EntropyEntry {
  GridPoint point;
  double entropy = 0.0;
};

struct EntropyMap {
  std::vector<EntropyEntry> entries;
  int best = 0;  // index into entries
  double best_entropy = 0.0;
  int n_bins = 0;

  const GridPoint& best_point() const { return entries[static_cast<std::size_t>(best)].point; }
};

/// Predictive entropy at every candidate site. Each site gets its own RNG
/// substream keyed by its index, so the map is independent of evaluation
/// order. One shared bin range — the pooled [min, max] over every draw in
/// the map — makes entropies comparable across sites: a site where the
/// ensemble disagrees (a two-level mixture) then always scores above a site
/// where it is unanimous (a single noise-width Gaussian). Ties break toward
/// the lowest index.
inline EntropyMap entropy_map(const PosteriorEnsemble& ensemble, const SensorResponse& s,
                              const CandidateGrid& grid, const InquiryConfig& cfg,
                              std::uint64_t seed) {
  if (!cfg.valid()) throw std::invalid_argument("entropy_map: invalid inquiry config");
  if (grid.points.empty()) throw EmptyGrid("entropy_map: empty candidate grid");

  std::vector<std::vector<double>> all_draws(grid.points.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    Rng rng = child_rng({seed, kStreamMapPoint, static_cast<std::uint64_t>(i)});
    const GridPoint& gp = grid.points[i];
    all_draws[i] = predictive_draws(ensemble, s, gp.x, gp.y, cfg.k_per_model, rng);
    const auto [lo_it, hi_it] = std::minmax_element(all_draws[i].begin(), all_draws[i].end());
    lo = std::min(lo, *lo_it);
    hi = std::max(hi, *hi_it);
  }

  EntropyMap map;
  map.n_bins = cfg.n_bins;
  map.entries.resize(grid.points.size());
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    map.entries[i] = {grid.points[i], histogram_entropy(all_draws[i], cfg.n_bins, lo, hi)};
  map.best = 0;
  map.best_entropy = map.entries[0].entropy;
  for (std::size_t i = 1; i < map.entries.size(); ++i) {
    if (map.entries[i].entropy > map.best_entropy) {
      map.best = static_cast<int>(i);
      map.best_entropy = map.entries[i].entropy;
    }
  }
  return map;
}

struct SelectedMeasurement {
  GridPoint point;
  double entropy = 0.0;
  EntropyMap map;
};

/// One acquisition step: build a fresh jittered grid and pick the site whose
/// predictive distribution has maximum entropy.
inline SelectedMeasurement select_measurement(const PosteriorEnsemble& ensemble,
                                              const SensorResponse& s,
                                              const FieldBounds& field,
                                              const InquiryConfig& cfg,
                                              std::uint64_t seed) {
  const CandidateGrid grid = build_jittered_grid(field, cfg.grid_spacing, seed);
  SelectedMeasurement sel;
  sel.map = entropy_map(ensemble, s, grid, cfg, seed);
  sel.point = sel.map.best_point();
  sel.entropy = sel.map.best_entropy;
  return sel;
}

/// Fraction of ensemble members whose disk contains (x, y).
inline double white_fraction(const PosteriorEnsemble& ensemble, double x, double y) {
  if (ensemble.circles.empty()) throw std::invalid_argument("white_fraction: empty ensemble");
  std::size_t hits = 0;
  for (const Circle& c : ensemble.circles)
    if (contains_point(c, x, y)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ensemble.circles.size());
}

}  // namespace scout
