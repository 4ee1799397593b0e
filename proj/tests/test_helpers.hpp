#pragma once

#include <cmath>
#include <initializer_list>

#include "ewb/geometry.hpp"

namespace ewb::testing {

inline Point euclid(std::initializer_list<double> coords) {
  Eigen::VectorXd v(static_cast<int>(coords.size()));
  int i = 0;
  for (const double c : coords) v(i++) = c;
  return Point{SpaceKind::Euclidean, v};
}

inline Point qpoint(std::initializer_list<double> coords) {
  Eigen::VectorXd v(static_cast<int>(coords.size()));
  int i = 0;
  for (const double c : coords) v(i++) = c;
  return Point{SpaceKind::Quantile, v};
}

/// Sphere point from polar angle (from the north pole) and azimuth.
inline Point sphere_point(double theta, double phi) {
  Eigen::VectorXd v(3);
  v << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
  return Point{SpaceKind::Sphere, v};
}

/// Hyperboloid point at hyperbolic distance r from the origin, direction phi.
inline Point hyperbolic_point(double r, double phi) {
  Eigen::VectorXd v(3);
  v << std::cosh(r), std::sinh(r) * std::cos(phi), std::sinh(r) * std::sin(phi);
  return Point{SpaceKind::Hyperbolic, v};
}

/// 2x2 SPD point from the symmetric log-coordinates (fed through exp).
inline Point spd_from_log(double l00, double l01, double l11) {
  Eigen::VectorXd flat(4);
  flat << l00, l01, l01, l11;
  return Point{SpaceKind::Spd, sym_exp_flat(flat, 2)};
}

/// Direct 2x2 SPD point.
inline Point spd_point(double a, double b, double d) {
  Eigen::VectorXd flat(4);
  flat << a, b, b, d;
  return Point{SpaceKind::Spd, flat};
}

}  // namespace ewb::testing
