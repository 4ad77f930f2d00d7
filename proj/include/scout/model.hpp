#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "scout/geometry.hpp"
#include "scout/rng.hpp"

namespace scout {

// Sensor response model: expected light level on white / on black, plus
// Gaussian read noise. Units are normalized sensor units.
struct SensorResponse {
  double white_level = 0.8;
  double black_level = 0.2;
  double sigma = 0.06;

  bool valid() const { return white_level > black_level && sigma > 0.0; }
};

struct Measurement {
  double x = 0.0;
  double y = 0.0;
  double d = 0.0;
  int index = 0;
};

// Append-only ordered measurement set; indices are contiguous from 1.
struct Dataset {
  std::vector<Measurement> measurements;

  void append(double x, double y, double d) {
    measurements.push_back({x, y, d, static_cast<int>(measurements.size()) + 1});
  }
  std::size_t size() const { return measurements.size(); }
  bool empty() const { return measurements.empty(); }
};

// Support of the uniform priors: center anywhere in the field, radius in
// [r_min, r_max]. Closed on all boundaries. The disk itself may extend
// beyond the field.
struct PriorSupport {
  FieldBounds field{};
  double r_min = 1.0;
  double r_max = 15.0;

  bool valid() const { return field.valid() && r_min >= 0.0 && r_min < r_max; }
  bool admits(const Circle& c) const {
    return field.contains(c.x0, c.y0) && c.r >= r_min && c.r <= r_max;
  }
  double volume() const { return field.width() * field.height() * (r_max - r_min); }
};

inline constexpr double kHalfLogTwoPi = 0.91893853320467274178;

inline double gaussian_log_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return -0.5 * z * z - std::log(sigma) - kHalfLogTwoPi;
}

/// Log of the product of the three uniform densities; -inf off support.
inline double log_prior(const Circle& c, const PriorSupport& s) {
  if (!s.admits(c)) return -std::numeric_limits<double>::infinity();
  return -std::log(s.volume());
}

inline Circle sample_prior(const PriorSupport& s, Rng& rng) {
  Circle c;
  c.x0 = uniform_real(rng, s.field.x_min, s.field.x_max);
  c.y0 = uniform_real(rng, s.field.y_min, s.field.y_max);
  c.r = uniform_real(rng, s.r_min, s.r_max);
  return c;
}

inline double log_likelihood_point(const Circle& c, const SensorResponse& s,
                                   const Measurement& m) {
  const double mean = contains_point(c, m.x, m.y) ? s.white_level : s.black_level;
  return gaussian_log_pdf(m.d, mean, s.sigma);
}

/// Measurements are conditionally independent given the circle; the empty
/// dataset has log-likelihood 0.
inline double log_likelihood(const Circle& c, const SensorResponse& s,
                             const Dataset& data) {
  if (data.empty()) return 0.0;
  // Hoist the per-point normalization constant out of the loop.
  const double norm = -std::log(s.sigma) - kHalfLogTwoPi;
  const double inv_sigma = 1.0 / s.sigma;
  double sum_sq = 0.0;
  for (const Measurement& m : data.measurements) {
    const double mean = contains_point(c, m.x, m.y) ? s.white_level : s.black_level;
    const double z = (m.d - mean) * inv_sigma;
    sum_sq += z * z;
  }
  return static_cast<double>(data.size()) * norm - 0.5 * sum_sq;
}

}  // namespace scout
