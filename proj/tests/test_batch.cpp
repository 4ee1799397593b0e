#include <doctest.h>

#include <cmath>

#include "ewb/analysis.hpp"
#include "ewb/batch.hpp"
#include "test_helpers.hpp"

using namespace ewb;
using namespace ewb::testing;

TEST_CASE("online_to_batch: two iterates average to the midpoint") {
  const Space line = Space::euclidean_ball(1, 1.0);
  const BatchTask task = quadratic_task(line);
  const Schedule sched = Schedule::constant(1.0 / (2.0 * line.diameter * line.diameter));
  const BatchResult res = online_to_batch(line, sched, task, 1, 200, 5);
  REQUIRE(res.iterates.size() == 2);
  const double mid = 0.5 * (res.iterates[0].value(0) + res.iterates[1].value(0));
  CHECK(res.theta_hat.value(0) == doctest::Approx(mid).epsilon(1e-12));
  CHECK(res.jensen_ok);
}

TEST_CASE("online_to_batch: identical iterates collapse to that point") {
  const Space line = Space::euclidean_ball(1, 1.0);
  ParticleMeasure pm = uniform_measure({euclid({0.3}), euclid({0.3}), euclid({0.3})});
  const BarycenterResult r = barycenter(line, pm);
  CHECK(r.point.value(0) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("online_to_batch: 1-D quadratic estimator approaches the mean") {
  const Space line = Space::euclidean_ball(1, 1.0);
  const BatchTask task = quadratic_task(line);
  // z uniform on [-1, 1]: risk minimizer 0, minimal risk E z^2 = 1/3
  CHECK(*task.minimal_risk == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const Schedule sched = Schedule::constant(1.0 / (2.0 * line.diameter * line.diameter));
  const BatchResult res = online_to_batch(line, sched, task, 500, 2000, 7);
  CHECK(std::abs(res.theta_hat.value(0)) <= 0.1);
  CHECK(res.jensen_ok);
  CHECK(res.jensen_worst_gap <= 1e-8);
}

TEST_CASE("excess_risk: at the minimizer the estimate vanishes") {
  const Space disk = Space::euclidean_ball(2, 1.0);
  const BatchTask task = quadratic_task(disk);
  const ExcessRiskReport rep = excess_risk(disk, *task.minimizer, task, 200000, 11, 1.0);
  CHECK(rep.conclusive);
  CHECK(std::abs(rep.estimate) <= 3.0 * rep.stderr_);
}

TEST_CASE("excess_risk: conversion bound value") {
  // B_{n+1}/(n+1) at beta = 1, p = 2, kappa >= 0, n = 99
  const double bound = regret_bound_expconcave(1.0, 2.0, 100, 1.0) / 100.0;
  CHECK(bound == doctest::Approx(0.11210340371976183).epsilon(1e-13));
}

TEST_CASE("excess_risk: theta-independent loss shifts cancel in comparisons") {
  const Space disk = Space::euclidean_ball(2, 1.0);
  const BatchTask base = quadratic_task(disk);
  BatchTask shifted = base;
  shifted.loss = [&base](const Point& theta, const Eigen::VectorXd& z) {
    return base.loss(theta, z) + 10.0 * z(0);  // depends on z only
  };
  // with paired draws the shift moves every estimate by the same empirical
  // constant, so estimate differences between parameters are unchanged
  const Point th1 = euclid({0.2, -0.1});
  const Point th2 = euclid({-0.4, 0.3});
  const double base_gap = excess_risk(disk, th1, base, 50000, 13, 1.0).estimate -
                          excess_risk(disk, th2, base, 50000, 13, 1.0).estimate;
  const double shifted_gap = excess_risk(disk, th1, shifted, 50000, 13, 1.0).estimate -
                             excess_risk(disk, th2, shifted, 50000, 13, 1.0).estimate;
  CHECK(base_gap == doctest::Approx(shifted_gap).epsilon(1e-10));
}

TEST_CASE("excess_risk: missing oracle is inconclusive") {
  const Space disk = Space::euclidean_ball(2, 1.0);
  BatchTask task = quadratic_task(disk);
  task.minimal_risk.reset();
  const ExcessRiskReport rep = excess_risk(disk, euclid({0, 0}), task, 100, 17, 1.0);
  CHECK_FALSE(rep.conclusive);
}

TEST_CASE("online_to_batch: end-to-end excess risk within the conversion bound") {
  const Space disk = Space::euclidean_ball(2, 1.0);
  const BatchTask task = quadratic_task(disk);
  const double beta = 1.0 / (2.0 * disk.diameter * disk.diameter);
  const Schedule sched = Schedule::constant(beta);
  const long n = 200;
  const double bound =
      regret_bound_expconcave(beta, disk.dim_p, n + 1, 1.0) / static_cast<double>(n + 1);
  double mean = 0.0;
  const int reps = 5;
  for (int r = 0; r < reps; ++r) {
    const BatchResult br = online_to_batch(disk, sched, task, n, 2000, 100 + r);
    CHECK(br.jensen_ok);
    const ExcessRiskReport er = excess_risk(disk, br.theta_hat, task, 100000, 100 + r, bound);
    mean += er.estimate;
  }
  mean /= reps;
  CHECK(mean <= bound);
}
