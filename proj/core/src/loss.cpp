#include "ewb/loss.hpp"

namespace ewb {

void validate_meta(const LossFn& f) {
  const LossMeta& m = f.meta;
  if (m.beta_expconcave && !(*m.beta_expconcave > 0)) {
    throw DomainError("loss meta: beta_expconcave must be positive");
  }
  if (m.lipschitz && !(*m.lipschitz > 0)) {
    throw DomainError("loss meta: lipschitz must be positive");
  }
  if (m.range && !(m.range->first <= m.range->second)) {
    throw DomainError("loss meta: empty range");
  }
  if (m.alpha && m.lipschitz && m.beta_expconcave) {
    const double cap = *m.alpha / (*m.lipschitz * *m.lipschitz);
    if (*m.beta_expconcave > cap + 1e-12) {
      throw DomainError("loss meta: beta_expconcave exceeds alpha / lipschitz^2");
    }
  }
}

LossFn squared_distance_loss(const Space& space, Point center) {
  validate_point(space, center);
  LossFn f;
  const double diam = space.diameter;
  f.meta.lipschitz = 2.0 * diam;
  f.meta.range = std::make_pair(0.0, diam * diam);
  if (space.kappa <= 0) {
    f.meta.alpha = 2.0;
    f.meta.beta_expconcave = 1.0 / (2.0 * diam * diam);
  } else {
    f.meta.alpha = 0.0;
  }
  f.eval = [space, c = std::move(center)](const Point& x) {
    const double d = distance(space, c, x);
    return d * d;
  };
  return f;
}

LossFn scaled_distance_loss(const Space& space, Point center) {
  validate_point(space, center);
  LossFn f;
  f.meta.alpha = 0.0;
  f.meta.lipschitz = 1.0 / space.diameter;
  f.meta.range = std::make_pair(0.0, 1.0);
  f.eval = [space, c = std::move(center)](const Point& x) {
    return distance(space, c, x) / space.diameter;
  };
  return f;
}

}  // namespace ewb
