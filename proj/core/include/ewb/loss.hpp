#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "ewb/geometry.hpp"

namespace ewb {

/// Declared regularity of a loss: geodesic alpha-convexity modulus,
/// expconcavity parameter, Lipschitz constant and value range. All fields
/// are optional; checkers verify the declared ones.
struct LossMeta {
  std::optional<double> alpha;
  std::optional<double> beta_expconcave;
  std::optional<double> lipschitz;
  std::optional<std::pair<double, double>> range;
};

struct LossFn {
  std::function<double(const Point&)> eval;
  LossMeta meta;

  double operator()(const Point& x) const { return eval(x); }
};

/// Throws DomainError when the declared metadata is internally inconsistent
/// (a declared expconcavity parameter must satisfy beta <= alpha / L^2 when
/// alpha and the Lipschitz constant are declared too).
void validate_meta(const LossFn& f);

/// d^2(center, .): 2-convex on the flat and negatively curved kinds and
/// expconcave up to 1/(2 diam^2) there; on the sphere cap only plain
/// convexity is declared.
LossFn squared_distance_loss(const Space& space, Point center);

/// d(center, .) / diam, valued in [0, 1]; geodesically convex on every
/// supported space (cap diameters stay below the convexity radius).
LossFn scaled_distance_loss(const Space& space, Point center);

}  // namespace ewb
