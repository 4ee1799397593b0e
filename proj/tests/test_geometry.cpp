#include <doctest.h>

#include <cmath>

#include "ewb/geometry.hpp"
#include "test_helpers.hpp"

using namespace ewb;
using namespace ewb::testing;

namespace {

const Space kDisk = Space::euclidean_ball(2, 1.0);
const Space kCap = Space::sphere_cap(0.7);
const Space kHyp = Space::hyperbolic_disk(1.0);
const Space kSpd = Space::spd_log_box(2, 1.0);
const Space kQuant = Space::quantile_box(8, 0.0, 1.0);

std::vector<Space> all_spaces() { return {kDisk, kCap, kHyp, kSpd, kQuant}; }

}  // namespace

TEST_CASE("distance: closed-form values") {
  const Space line = Space::euclidean_ball(2, 10.0);
  CHECK(distance(line, euclid({0, 0}), euclid({3, 4})) == doctest::Approx(5.0).epsilon(1e-14));

  const Space q2 = Space::quantile_box(2, 0.0, 2.0);
  CHECK(distance(q2, qpoint({0, 0}), qpoint({2, 2})) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(distance(kCap, sphere_point(0.0, 0.0), sphere_point(0.5, 0.0)) ==
        doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("distance: metric axioms on random points") {
  for (const Space& space : all_spaces()) {
    CAPTURE(to_string(space.kind));
    Rng rng(101);
    for (int i = 0; i < 50; ++i) {
      const Point x = sample_one(space, rng);
      const Point y = sample_one(space, rng);
      const Point z = sample_one(space, rng);
      const double dxy = distance(space, x, y);
      CHECK(dxy >= 0.0);
      CHECK(distance(space, y, x) == doctest::Approx(dxy).epsilon(1e-12));
      CHECK(distance(space, x, x) <= 1e-12);
      CHECK(dxy <= distance(space, x, z) + distance(space, z, y) + 1e-10);
      CHECK(dxy <= space.diameter + 1e-9);
    }
  }
}

TEST_CASE("distance: kind mismatch and invalid points are rejected") {
  CHECK_THROWS_AS(distance(kDisk, euclid({0, 0}), sphere_point(0.1, 0.0)), SpaceMismatchError);
  Point bad = sphere_point(0.1, 0.0);
  bad.value *= 1.5;  // not a unit vector
  CHECK_THROWS_AS(validate_point(kCap, bad), DomainError);
  CHECK_THROWS_AS(validate_point(kQuant, qpoint({0.5, 0.2, 0.7, 0.1, 0.3, 0.4, 0.6, 0.8})),
                  DomainError);
}

TEST_CASE("geodesic_point: endpoints and midpoints") {
  const Space e2 = Space::euclidean_ball(2, 3.0);
  const Point mid = geodesic_point(e2, euclid({0, 0}), euclid({2, 0}), 0.5);
  CHECK(mid.value(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid.value(1) == doctest::Approx(0.0));

  for (const Space& space : all_spaces()) {
    Rng rng(7);
    const Point x = sample_one(space, rng);
    const Point y = sample_one(space, rng);
    const Point g0 = geodesic_point(space, x, y, 0.0);
    const Point g1 = geodesic_point(space, x, y, 1.0);
    CHECK((g0.value - x.value).norm() == 0.0);  // exact endpoint identity
    CHECK((g1.value - y.value).norm() == 0.0);
  }

  CHECK_THROWS_AS(geodesic_point(kDisk, euclid({0, 0}), euclid({0.5, 0}), 1.5), DomainError);
}

TEST_CASE("geodesic_point: constant-speed property, all spaces") {
  for (const Space& space : all_spaces()) {
    CAPTURE(to_string(space.kind));
    Rng rng(13);
    for (int i = 0; i < 30; ++i) {
      const Point x = sample_one(space, rng);
      const Point y = sample_one(space, rng);
      const double d = distance(space, x, y);
      double s = rng.uniform(), t = rng.uniform();
      if (s > t) std::swap(s, t);
      const Point gs = geodesic_point(space, x, y, s);
      const Point gt = geodesic_point(space, x, y, t);
      CHECK(distance(space, gs, gt) == doctest::Approx((t - s) * d).epsilon(1e-8));
      CHECK(distance(space, x, gt) == doctest::Approx(t * d).epsilon(1e-8));
    }
  }
}

TEST_CASE("geodesic_point: spd log-Euclidean closed form has unit speed") {
  Rng rng(29);
  for (int i = 0; i < 20; ++i) {
    const Point a = sample_one(kSpd, rng);
    const Point b = sample_one(kSpd, rng);
    const double d = distance(kSpd, a, b);
    for (const double t : {0.25, 0.5, 0.75}) {
      const Point g = geodesic_point(kSpd, a, b, t);
      CHECK(distance(kSpd, a, g) == doctest::Approx(t * d).epsilon(1e-9));
      CHECK(distance(kSpd, g, b) == doctest::Approx((1 - t) * d).epsilon(1e-9));
    }
  }
}

TEST_CASE("geodesic_point: antipodal sphere points are rejected") {
  const Point north = sphere_point(0.0, 0.0);
  Point south = north;
  south.value = -south.value;
  CHECK_THROWS_AS(geodesic_point(kCap, north, south, 0.5), NonUniqueGeodesicError);
}

TEST_CASE("homothety: contraction endpoints") {
  const Space e2 = Space::euclidean_ball(2, 6.0);
  const Point c = euclid({0, 0});
  const Point y = euclid({4, 4});
  CHECK((homothety(e2, c, y, 1.0).value - y.value).norm() == 0.0);
  CHECK((homothety(e2, c, y, 0.0).value - c.value).norm() == 0.0);
  const Point h = homothety(e2, c, y, 0.25);
  CHECK(h.value(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h.value(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exp and log maps invert each other") {
  for (const Space& space : all_spaces()) {
    CAPTURE(to_string(space.kind));
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
      const Point x = sample_one(space, rng);
      const Point y = sample_one(space, rng);
      const Eigen::VectorXd v = log_map(space, x, y);
      CHECK(tangent_norm(space, x, v) == doctest::Approx(distance(space, x, y)).epsilon(1e-10));
      const Point back = exp_map(space, x, v);
      CHECK(distance(space, back, y) <= 1e-10 * (1.0 + distance(space, x, y)));
    }
  }
}

TEST_CASE("s_kappa: values and continuity in kappa") {
  CHECK(s_kappa(0.0, 1.7) == 1.7);
  CHECK(s_kappa(1.0, 1.5707963267948966) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s_kappa(-1.0, 1.0) == doctest::Approx(1.1752011936438014).epsilon(1e-15));
  // series branch agrees with the direct evaluation across the switch
  for (const double kappa : {1e-9, -1e-9, 1e-3, -1e-3}) {
    for (const double r : {0.5, 1.0, 2.0}) {
      const double direct = kappa > 0 ? std::sin(r * std::sqrt(kappa)) / std::sqrt(kappa)
                                      : std::sinh(r * std::sqrt(-kappa)) / std::sqrt(-kappa);
      CHECK(s_kappa(kappa, r) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(s_kappa(1.0, -0.5), DomainError);
}

TEST_CASE("s_kappa: increasing on the monotonicity domain") {
  for (const double kappa : {1.0, 0.0, -1.0, 2.5, -0.3}) {
    CAPTURE(kappa);
    const double upper = kappa > 0 ? 0.5 * model_diameter(kappa) * 0.999 : 5.0;
    double prev = -1.0;
    for (int i = 0; i <= 500; ++i) {
      const double cur = s_kappa(kappa, upper * i / 500.0);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("comparison_distance: flat formula and endpoints") {
  CHECK(comparison_distance(0.0, 1.0, 1.0, 1.0, 0.5) ==
        doctest::Approx(0.86602540378443865).epsilon(1e-14));
  for (const double kappa : {0.0, 1.0, -1.0}) {
    CHECK(comparison_distance(kappa, 0.6, 0.9, 0.8, 0.0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(comparison_distance(kappa, 0.6, 0.9, 0.8, 1.0) == doctest::Approx(0.9).epsilon(1e-12));
  }
  CHECK_THROWS_AS(comparison_distance(0.0, 1.0, 1.0, 3.0, 0.5), DomainError);   // no triangle
  CHECK_THROWS_AS(comparison_distance(1.0, 2.5, 2.5, 2.0, 0.5), DomainError);   // perimeter
}

TEST_CASE("comparison_distance: matches a planar embedding") {
  // oracle: realize the triangle in R^2 and measure the distance directly
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector2d p(rng.uniform(-1, 1), rng.uniform(-1, 1));
    Eigen::Vector2d x(rng.uniform(-1, 1), rng.uniform(-1, 1));
    Eigen::Vector2d y(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double a = (p - x).norm(), b = (p - y).norm(), c = (x - y).norm();
    const double t = rng.uniform();
    const Eigen::Vector2d g = (1 - t) * x + t * y;
    CHECK(comparison_distance(0.0, a, b, c, t) == doctest::Approx((p - g).norm()).epsilon(1e-10));
  }
}

TEST_CASE("comparison_distance: model-plane equality on the sphere and hyperboloid") {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const Point p = sample_one(kCap, rng);
    const Point x = sample_one(kCap, rng);
    const Point y = sample_one(kCap, rng);
    const double a = distance(kCap, p, x), b = distance(kCap, p, y), c = distance(kCap, x, y);
    const double t = rng.uniform();
    const double actual = distance(kCap, p, geodesic_point(kCap, x, y, t));
    CHECK(comparison_distance(1.0, a, b, c, t) == doctest::Approx(actual).epsilon(5e-10));
  }
  for (int i = 0; i < 100; ++i) {
    const Point p = sample_one(kHyp, rng);
    const Point x = sample_one(kHyp, rng);
    const Point y = sample_one(kHyp, rng);
    const double a = distance(kHyp, p, x), b = distance(kHyp, p, y), c = distance(kHyp, x, y);
    const double t = rng.uniform();
    const double actual = distance(kHyp, p, geodesic_point(kHyp, x, y, t));
    CHECK(comparison_distance(-1.0, a, b, c, t) == doctest::Approx(actual).epsilon(5e-10));
  }
}

TEST_CASE("curvature comparisons: flat equality, sphere lower, hyperbolic upper") {
  Rng rng(41);
  // Euclidean: the flat comparison holds as an identity
  for (int i = 0; i < 300; ++i) {
    const Point p = sample_one(kDisk, rng);
    const Point x = sample_one(kDisk, rng);
    const Point y = sample_one(kDisk, rng);
    const double a = distance(kDisk, p, x), b = distance(kDisk, p, y), c = distance(kDisk, x, y);
    const double t = rng.uniform();
    const double lhs = distance(kDisk, p, geodesic_point(kDisk, x, y, t));
    CHECK(std::abs(lhs - comparison_distance(0.0, a, b, c, t)) <= 1e-10);
  }
  // sphere cap: lower bound against the flat model
  for (int i = 0; i < 300; ++i) {
    const Point p = sample_one(kCap, rng);
    const Point x = sample_one(kCap, rng);
    const Point y = sample_one(kCap, rng);
    const double a = distance(kCap, p, x), b = distance(kCap, p, y), c = distance(kCap, x, y);
    const double t = rng.uniform();
    const double lhs = distance(kCap, p, geodesic_point(kCap, x, y, t));
    CHECK(lhs >= comparison_distance(0.0, a, b, c, t) - 1e-9);
  }
  // hyperbolic disk: upper bound against the flat model
  for (int i = 0; i < 300; ++i) {
    const Point p = sample_one(kHyp, rng);
    const Point x = sample_one(kHyp, rng);
    const Point y = sample_one(kHyp, rng);
    const double a = distance(kHyp, p, x), b = distance(kHyp, p, y), c = distance(kHyp, x, y);
    const double t = rng.uniform();
    const double lhs = distance(kHyp, p, geodesic_point(kHyp, x, y, t));
    CHECK(lhs <= comparison_distance(0.0, a, b, c, t) + 1e-9);
  }
}

TEST_CASE("sample_prior: determinism and domain membership") {
  for (const Space& space : all_spaces()) {
    CAPTURE(to_string(space.kind));
    const auto s1 = sample_prior(space, 200, 99);
    const auto s2 = sample_prior(space, 200, 99);
    REQUIRE(s1.size() == s2.size());
    for (size_t i = 0; i < s1.size(); ++i) {
      CHECK((s1[i].value - s2[i].value).norm() == 0.0);
      CHECK(contains(space, s1[i]));
    }
  }
  CHECK_THROWS_AS(sample_prior(kDisk, 0, 1), DomainError);
}

TEST_CASE("sample_prior: euclidean ball is centered") {
  const auto pts = sample_prior(kDisk, 100000, 5);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const Point& p : pts) mean += Eigen::Vector2d(p.value);
  mean /= static_cast<double>(pts.size());
  // per-coordinate sd is 1/2, so the mean has sd 0.5/sqrt(n)
  const double sigma = 0.5 / std::sqrt(static_cast<double>(pts.size()));
  CHECK(std::abs(mean(0)) < 3 * sigma);
  CHECK(std::abs(mean(1)) < 3 * sigma);
}

TEST_CASE("sample_prior: sphere cap sub-cap mass matches the area formula") {
  const double theta0 = kCap.params.cap_angle;
  const auto pts = sample_prior(kCap, 100000, 6);
  long hits = 0;
  for (const Point& p : pts) {
    if (std::acos(std::clamp(p.value(2), -1.0, 1.0)) <= theta0 / 2) ++hits;
  }
  const double expected = (1 - std::cos(theta0 / 2)) / (1 - std::cos(theta0));
  const double got = static_cast<double>(hits) / pts.size();
  const double se = std::sqrt(expected * (1 - expected) / pts.size());
  CHECK(std::abs(got - expected) < 3 * se);
}

TEST_CASE("sample_prior: hyperbolic disk radial law") {
  const double r0 = kHyp.params.radius;
  const auto pts = sample_prior(kHyp, 100000, 8);
  const Point center = hyperbolic_point(0.0, 0.0);
  long hits = 0;
  for (const Point& p : pts) {
    if (distance(kHyp, center, p) <= r0 / 2) ++hits;
  }
  const double expected = (std::cosh(r0 / 2) - 1) / (std::cosh(r0) - 1);
  const double got = static_cast<double>(hits) / pts.size();
  const double se = std::sqrt(expected * (1 - expected) / pts.size());
  CHECK(std::abs(got - expected) < 3 * se);
}

TEST_CASE("sample_prior: quantile sampler is sorted with order-statistic mean") {
  const int k = kQuant.params.dim;
  const auto pts = sample_prior(kQuant, 20000, 10);
  double min_sum = 0.0;
  for (const Point& p : pts) {
    for (int i = 0; i + 1 < k; ++i) REQUIRE(p.value(i) <= p.value(i + 1));
    min_sum += p.value(0);
  }
  const double expected = 1.0 / (k + 1);  // E[min of k uniforms]
  const double var = static_cast<double>(k) / ((k + 1.0) * (k + 1.0) * (k + 2.0));
  const double se = std::sqrt(var / pts.size());
  CHECK(std::abs(min_sum / pts.size() - expected) < 3 * se);
}

TEST_CASE("space factories enforce the curvature-diameter constraint") {
  CHECK_THROWS_AS(Space::sphere_cap(1.6), DomainError);  // >= pi/2
  CHECK_THROWS_AS(Space::euclidean_ball(0, 1.0), DomainError);
  CHECK_THROWS_AS(Space::quantile_box(4, 1.0, 0.0), DomainError);
}

TEST_CASE("space JSON round trip") {
  for (const Space& space : all_spaces()) {
    const std::string text = to_json_text(space);
    const Space back = space_from_json_text(text);
    CHECK(back.kind == space.kind);
    CHECK(back.dim_p == doctest::Approx(space.dim_p));
    CHECK(back.kappa == doctest::Approx(space.kappa));
    CHECK(back.diameter == doctest::Approx(space.diameter));
    CHECK(to_json_text(back) == text);
  }
  CHECK_THROWS_AS(
      space_from_json_text(R"({"kind":"euclidean","p":7.0,"params":{"dim":2,"radius":1.0}})"),
      ConfigError);
}
