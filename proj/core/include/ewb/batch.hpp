#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ewb/forecaster.hpp"

namespace ewb {

/// A statistical learning task: loss l(theta, z), a seeded sampler for Z,
/// and (for synthetic tasks) the known risk minimizer and minimal risk.
/// l(., z) must be geodesically convex for every z; the declared per-z
/// regularity is checkable through the convexity checkers.
struct BatchTask {
  std::string name;
  std::function<double(const Point&, const Eigen::VectorXd&)> loss;
  std::function<Eigen::VectorXd(Rng&)> sample;
  LossMeta per_z_meta;
  std::optional<Point> minimizer;
  std::optional<double> minimal_risk;
};

/// l(theta, z) = d^2(point(z), theta) with Z drawn from the space prior.
/// The risk minimizer is the barycenter of the prior; minimal risk has a
/// closed form on the Euclidean ball.
BatchTask quadratic_task(const Space& space);

struct BatchResult {
  Point theta_hat;              // barycenter of the n+1 forecaster iterates
  std::vector<Point> iterates;  // theta_1 .. theta_{n+1}
  double jensen_worst_gap = 0.0;  // max_z [ l(theta_hat,z) - avg_t l(theta_t,z) ]
  bool jensen_ok = true;          // gap <= 1e-8 over the probed z draws
};

/// Online-to-batch conversion: draws Z_1..Z_n, runs the forecaster on the
/// induced loss sequence, and returns the unweighted barycenter of the
/// n+1 iterates. theta_t depends only on Z_1..Z_{t-1} by construction.
BatchResult online_to_batch(const Space& space, const Schedule& schedule, const BatchTask& task,
                            long n, int n_atoms, std::uint64_t seed, int n_jensen_probes = 100);

struct ExcessRiskReport {
  double estimate = 0.0;  // Monte Carlo risk of theta_hat minus the minimal risk
  double stderr_ = 0.0;
  double bound = 0.0;  // B_{n+1} / (n+1) passed in by the caller
  bool conclusive = true;  // false when the task provides no minimal-risk oracle
};

ExcessRiskReport excess_risk(const Space& space, const Point& theta_hat, const BatchTask& task,
                             long n_mc, std::uint64_t seed, double bound);

}  // namespace ewb
