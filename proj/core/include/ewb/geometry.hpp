#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ewb/errors.hpp"
#include "ewb/rng.hpp"

namespace ewb {

enum class SpaceKind { Euclidean, Sphere, Hyperbolic, Spd, Quantile };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

/// A point of one of the supported spaces. The payload layout depends on the
/// kind:
///   euclidean   coordinates in R^d
///   sphere      unit vector in R^3 (2-sphere, cap around the north pole)
///   hyperbolic  hyperboloid-model coordinates (x0 > 0, Minkowski norm -1)
///   spd         column-major flattened symmetric positive-definite matrix
///   quantile    nondecreasing quantile values at midpoints (i - 1/2)/K
struct Point {
  SpaceKind kind = SpaceKind::Euclidean;
  Eigen::VectorXd value;
};

struct SpaceParams {
  int dim = 2;                 // euclidean: vector length; spd: matrix size; quantile: K
  double radius = 1.0;         // euclidean ball / hyperbolic disk radius
  double cap_angle = 0.7;      // sphere: angular radius of the cap (< pi/2)
  double log_halfwidth = 1.0;  // spd: half-width of the box in log-matrix coordinates
  double q_min = 0.0;          // quantile: box bounds
  double q_max = 1.0;
};

/// Descriptor for one geodesic metric space together with its reference
/// (prior) measure. `dim_p` is the dimension parameter entering the
/// measure-contraction bounds, `kappa` the curvature tag of the space
/// (lower-bound sign convention), `diameter` the metric diameter of the
/// domain.
///
/// Reference measures: uniform (Lebesgue) on the Euclidean ball, uniform by
/// surface area on the sphere cap, uniform by hyperbolic area on the
/// hyperbolic disk, uniform in log-matrix coordinates on the SPD box, and
/// the sorted-uniform (order statistics) measure on the quantile box.
struct Space {
  SpaceKind kind = SpaceKind::Euclidean;
  double dim_p = 2.0;
  double kappa = 0.0;
  double diameter = 2.0;
  SpaceParams params;

  static Space euclidean_ball(int dim, double radius);
  static Space sphere_cap(double cap_angle);
  static Space hyperbolic_disk(double radius);
  static Space spd_log_box(int n, double log_halfwidth);
  static Space quantile_box(int k, double q_min, double q_max);
};

/// True if `x` has the right kind/shape and lies inside the domain (with a
/// small slack on the boundary constraints).
bool contains(const Space& space, const Point& x, double slack = 1e-9);

/// Throws SpaceMismatchError / DomainError when `x` is not a valid point.
void validate_point(const Space& space, const Point& x);

double distance(const Space& space, const Point& x, const Point& y);

/// Constant-speed geodesic from x to y evaluated at t in [0, 1].
/// Endpoints are returned exactly. Antipodal sphere inputs raise
/// NonUniqueGeodesicError.
Point geodesic_point(const Space& space, const Point& x, const Point& y, double t);

/// Geodesic homothety of the given center: h_center(y, eps), contracting y
/// toward the center with ratio eps.
Point homothety(const Space& space, const Point& center, const Point& y, double eps);

/// Riemannian logarithm of `target` in the tangent space at `base`.
/// For the flat kinds this is the coordinate difference (log-matrix
/// difference for spd).
Eigen::VectorXd log_map(const Space& space, const Point& base, const Point& target);

/// Riemannian exponential at `base`.
Point exp_map(const Space& space, const Point& base, const Eigen::VectorXd& tangent);

/// Norm of a tangent vector at `base` (Minkowski norm on the hyperboloid,
/// Euclidean/Frobenius otherwise).
double tangent_norm(const Space& space, const Point& base, const Eigen::VectorXd& tangent);

/// sin(r sqrt(k))/sqrt(k) for k > 0, r for k = 0, sinh(r sqrt(-k))/sqrt(-k)
/// for k < 0; continuous in k at 0 (series branch for |k| r^2 < 1e-8).
double s_kappa(double kappa, double r);

/// Diameter of the model plane of constant curvature kappa.
double model_diameter(double kappa);

/// Distance from the comparison point to the comparison geodesic at
/// parameter t, computed in the constant-curvature model plane from the
/// three side lengths alone: side_px = d(p,x), side_py = d(p,y),
/// side_xy = d(x,y). For kappa = 0 this is
/// sqrt((1-t) a^2 + t b^2 - t(1-t) c^2).
double comparison_distance(double kappa, double side_px, double side_py, double side_xy,
                           double t);

/// One draw from the space's reference measure.
Point sample_one(const Space& space, Rng& rng);

/// n i.i.d. draws from the reference measure; deterministic given seed.
std::vector<Point> sample_prior(const Space& space, int n, std::uint64_t seed);

/// JSON descriptor {"kind": ..., "p": ..., "kappa": ..., "diameter": ...,
/// "params": {...}}.
std::string to_json_text(const Space& space);
Space space_from_json_text(const std::string& text);

// --- small helpers shared with other modules ---

/// Minkowski inner product <x,y> = -x0 y0 + x1 y1 + x2 y2.
double minkowski_dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Matrix logarithm / exponential of a flattened symmetric matrix.
Eigen::VectorXd sym_log_flat(const Eigen::VectorXd& flat, int n);
Eigen::VectorXd sym_exp_flat(const Eigen::VectorXd& flat, int n);

}  // namespace ewb
