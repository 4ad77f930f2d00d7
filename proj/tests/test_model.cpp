#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "scout/scout.hpp"

using namespace scout;

namespace {

PriorSupport default_support() {
  return PriorSupport{FieldBounds{0.0, 20.0, 0.0, 30.0}, 1.0, 15.0};
}

SensorResponse default_response() { return SensorResponse{}; }

}  // namespace

TEST_CASE("contains_point: interior, boundary, and exterior") {
  const Circle c{5.0, 5.0, 2.0};
  CHECK(contains_point(c, 5.0, 5.0));
  CHECK(contains_point(c, 7.0, 5.0));  // exactly on the rim counts as inside
  CHECK_FALSE(contains_point(c, 7.001, 5.0));
  CHECK(contains_point(c, 5.0, 7.0));
  CHECK_FALSE(contains_point(c, 7.0, 7.0));
}

TEST_CASE("contains_point: reflection symmetry about the center") {
  const Circle c{3.5, -2.0, 4.25};
  const std::vector<std::pair<double, double>> probes = {
      {3.5, 2.0}, {7.0, -2.0}, {1.0, 1.0}, {-0.7, -2.0}, {3.5, -6.25}, {8.0, 3.0}};
  for (const auto& [px, py] : probes) {
    const double rx = 2.0 * c.x0 - px;
    const double ry = 2.0 * c.y0 - py;
    CHECK(contains_point(c, px, py) == contains_point(c, rx, ry));
  }
}

TEST_CASE("field bounds are closed on all edges") {
  const FieldBounds f{0.0, 20.0, 0.0, 30.0};
  CHECK(f.contains(0.0, 0.0));
  CHECK(f.contains(20.0, 30.0));
  CHECK(f.contains(0.0, 30.0));
  CHECK_FALSE(f.contains(-1e-9, 15.0));
  CHECK_FALSE(f.contains(20.0 + 1e-9, 15.0));
  CHECK_FALSE(f.contains(10.0, 30.0 + 1e-9));
}

TEST_CASE("log_prior: uniform density inside the box, -inf outside") {
  const auto sup = default_support();
  const double expected = std::log(1.0 / (20.0 * 30.0 * 14.0));

  CHECK(log_prior(Circle{10.0, 15.0, 5.0}, sup) == Catch::Approx(expected).epsilon(1e-12));
  // Density is constant across the support.
  CHECK(log_prior(Circle{1.0, 29.0, 14.5}, sup) ==
        Catch::Approx(log_prior(Circle{19.0, 0.5, 1.0}, sup)).epsilon(1e-12));

  // Radius below the lower bound is excluded.
  CHECK(log_prior(Circle{10.0, 15.0, 0.5}, sup) == -std::numeric_limits<double>::infinity());
  // Center on the field edge is still in support (closed bounds).
  CHECK(std::isfinite(log_prior(Circle{0.0, 15.0, 5.0}, sup)));
  CHECK(std::isfinite(log_prior(Circle{10.0, 15.0, 1.0}, sup)));
  CHECK(std::isfinite(log_prior(Circle{10.0, 15.0, 15.0}, sup)));
  CHECK(log_prior(Circle{-0.001, 15.0, 5.0}, sup) == -std::numeric_limits<double>::infinity());
  CHECK(log_prior(Circle{10.0, 15.0, 15.001}, sup) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log_prior: density integrates to one over the support") {
  const auto sup = default_support();
  // Midpoint quadrature of exp(log_prior) over the box.  The density is
  // constant so even a coarse grid is exact up to floating-point error.
  const int nx = 20, ny = 30, nr = 14;
  const double dx = sup.field.width() / nx;
  const double dy = sup.field.height() / ny;
  const double dr = (sup.r_max - sup.r_min) / nr;
  double integral = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nr; ++k) {
        const Circle c{sup.field.x_min + (i + 0.5) * dx, sup.field.y_min + (j + 0.5) * dy,
                       sup.r_min + (k + 0.5) * dr};
        integral += std::exp(log_prior(c, sup)) * dx * dy * dr;
      }
  CHECK(integral == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("sample_prior: draws live in the support and have the right moments") {
  const auto sup = default_support();
  Rng rng = child_rng({12345});
  const int n = 10000;
  double sum_r = 0.0;
  for (int i = 0; i < n; ++i) {
    const Circle c = sample_prior(sup, rng);
    REQUIRE(sup.admits(c));
    sum_r += c.r;
  }
  // Mean radius of U[1,15] is 8 with standard error (14/sqrt(12))/100 = 0.040.
  CHECK(sum_r / n == Catch::Approx(8.0).margin(3.0 * 0.0404));
}

TEST_CASE("sample_prior: identical seeds give identical draws") {
  const auto sup = default_support();
  Rng a = child_rng({777, 3});
  Rng b = child_rng({777, 3});
  for (int i = 0; i < 100; ++i) {
    const Circle ca = sample_prior(sup, a);
    const Circle cb = sample_prior(sup, b);
    CHECK(ca.x0 == cb.x0);
    CHECK(ca.y0 == cb.y0);
    CHECK(ca.r == cb.r);
  }
}

TEST_CASE("log_likelihood_point: Gaussian around the branch level") {
  const Circle c{10.0, 15.0, 5.0};
  SensorResponse resp;
  resp.sigma = 1.0;
  const double peak = -0.5 * std::log(2.0 * std::acos(-1.0));

  // Reading exactly at the white level, point inside the circle.
  CHECK(log_likelihood_point(c, resp, Measurement{10.0, 15.0, resp.white_level, 1}) ==
        Catch::Approx(peak).epsilon(1e-12));
  // Reading exactly at the black level, point outside.
  CHECK(log_likelihood_point(c, resp, Measurement{1.0, 1.0, resp.black_level, 1}) ==
        Catch::Approx(peak).epsilon(1e-12));
  // One sigma away from the branch level costs exactly 1/2.
  CHECK(log_likelihood_point(c, resp, Measurement{10.0, 15.0, resp.white_level + resp.sigma, 1}) ==
        Catch::Approx(peak - 0.5).epsilon(1e-12));
}

TEST_CASE("log_likelihood_point: maximized at the branch mean") {
  const Circle c{10.0, 15.0, 5.0};
  const SensorResponse resp = default_response();
  const double at_mean = log_likelihood_point(c, resp, Measurement{10.0, 15.0, resp.white_level, 1});
  for (double delta : {-0.3, -0.01, 0.01, 0.3}) {
    CHECK(log_likelihood_point(c, resp, Measurement{10.0, 15.0, resp.white_level + delta, 1}) <
          at_mean);
  }
  // An inside point is scored against d_white, not d_black.
  CHECK(log_likelihood_point(c, resp, Measurement{10.0, 15.0, resp.white_level, 1}) >
        log_likelihood_point(c, resp, Measurement{10.0, 15.0, resp.black_level, 1}));
}

TEST_CASE("log_likelihood: empty dataset, additivity, permutation invariance") {
  const Circle c{10.0, 15.0, 5.0};
  const SensorResponse resp = default_response();

  Dataset empty;
  CHECK(log_likelihood(c, resp, empty) == 0.0);

  Dataset two;
  two.append(10.0, 15.0, 0.78);
  two.append(2.0, 3.0, 0.21);
  const double sum = log_likelihood_point(c, resp, two.measurements[0]) +
                     log_likelihood_point(c, resp, two.measurements[1]);
  CHECK(log_likelihood(c, resp, two) == Catch::Approx(sum).epsilon(1e-12));

  Dataset swapped;
  swapped.append(2.0, 3.0, 0.21);
  swapped.append(10.0, 15.0, 0.78);
  CHECK(log_likelihood(c, resp, two) ==
        Catch::Approx(log_likelihood(c, resp, swapped)).epsilon(1e-12));
}

TEST_CASE("dataset appends carry 1-based contiguous indices") {
  Dataset d;
  d.append(1.0, 2.0, 0.5);
  d.append(3.0, 4.0, 0.6);
  d.append(5.0, 6.0, 0.7);
  REQUIRE(d.size() == 3);
  CHECK(d.measurements[0].index == 1);
  CHECK(d.measurements[1].index == 2);
  CHECK(d.measurements[2].index == 3);
}

TEST_CASE("default response levels and noise") {
  const SensorResponse resp = default_response();
  CHECK(resp.white_level == 0.8);
  CHECK(resp.black_level == 0.2);
  CHECK(resp.sigma == 0.06);
  CHECK(resp.valid());
}
