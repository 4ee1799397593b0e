#pragma once

#include <optional>

#include "ewb/loss.hpp"
#include "ewb/measures.hpp"

namespace ewb {

struct BarycenterOptions {
  double tol = 1e-9;   // tangent-mean norm target for the fixed-point kinds
  int max_iter = 200;
  std::optional<Point> init;  // defaults to the heaviest atom (lowest index on ties)
};

struct BarycenterResult {
  Point point;
  double variance = 0.0;  // variance functional attained at `point`
  int iterations = 0;
  bool converged = true;
  double gradient_norm_final = 0.0;
};

/// Variance functional: sum_i w_i d^2(x, atom_i).
double variance_at(const Space& space, const ParticleMeasure& pm, const Point& x);

/// Weighted barycenter (Frechet mean). Closed forms on the flat kinds
/// (weighted coordinate / log-matrix / quantile means); fixed-point
/// iteration x <- Exp_x(sum_i w_i Log_x(atom_i)) on the sphere and the
/// hyperboloid. Non-convergence is reported, never hidden.
BarycenterResult barycenter(const Space& space, const ParticleMeasure& pm,
                            const BarycenterOptions& opts = {});

/// Same solver on a raw atom list with normalized log weights; avoids
/// copying the atom vector in hot loops.
BarycenterResult barycenter_weighted(const Space& space, const std::vector<Point>& atoms,
                                     const Eigen::VectorXd& log_weights,
                                     const BarycenterOptions& opts = {});

/// JSON record for experiment logs.
std::string to_json_text(const BarycenterResult& result);

struct JensenReport {
  double lhs = 0.0;    // f at the barycenter
  double rhs = 0.0;    // sum_i w_i f(atom_i) - alpha/2 * attained variance
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
  bool conclusive = true;  // false when the barycenter solver did not converge
};

/// Checks f(x*) <= sum w_i f(atom_i) - alpha/2 V* for a geodesically
/// alpha-convex f (alpha = 0 gives the nonpositively-curved form).
JensenReport jensen_check(const Space& space, const ParticleMeasure& pm, const LossFn& f,
                          double alpha);

}  // namespace ewb
