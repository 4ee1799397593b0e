#include "ewb/barycenter.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace ewb {

namespace {

int heaviest_atom(const Eigen::VectorXd& log_weights) {
  int best = 0;
  for (int i = 1; i < log_weights.size(); ++i) {
    if (log_weights(i) > log_weights(best)) best = i;
  }
  return best;
}

double variance_weighted(const Space& space, const std::vector<Point>& atoms,
                         const Eigen::VectorXd& w, const Point& x) {
  double acc = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (w(static_cast<int>(i)) == 0.0) continue;
    const double d = distance(space, x, atoms[i]);
    acc += w(static_cast<int>(i)) * d * d;
  }
  return acc;
}

}  // namespace

double variance_at(const Space& space, const ParticleMeasure& pm, const Point& x) {
  return variance_weighted(space, pm.atoms, linear_weights(pm), x);
}

BarycenterResult barycenter_weighted(const Space& space, const std::vector<Point>& atoms,
                                     const Eigen::VectorXd& log_weights,
                                     const BarycenterOptions& opts) {
  if (atoms.empty()) throw DomainError("barycenter: empty measure");
  const Eigen::VectorXd w = log_weights.array().exp().matrix();
  BarycenterResult res;

  switch (space.kind) {
    case SpaceKind::Euclidean:
    case SpaceKind::Quantile: {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(atoms[0].value.size());
      for (size_t i = 0; i < atoms.size(); ++i) mean += w(static_cast<int>(i)) * atoms[i].value;
      res.point = Point{space.kind, mean};
      Eigen::VectorXd g = Eigen::VectorXd::Zero(mean.size());
      for (size_t i = 0; i < atoms.size(); ++i)
        g += w(static_cast<int>(i)) * (atoms[i].value - mean);
      res.gradient_norm_final = tangent_norm(space, res.point, g);
      res.converged = true;
      break;
    }
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      Eigen::VectorXd mean_log = Eigen::VectorXd::Zero(atoms[0].value.size());
      for (size_t i = 0; i < atoms.size(); ++i)
        mean_log += w(static_cast<int>(i)) * sym_log_flat(atoms[i].value, n);
      res.point = Point{space.kind, sym_exp_flat(mean_log, n)};
      res.gradient_norm_final = 0.0;
      res.converged = true;
      break;
    }
    case SpaceKind::Sphere:
    case SpaceKind::Hyperbolic: {
      Point x = opts.init ? *opts.init : atoms[heaviest_atom(log_weights)];
      double gn = 0.0;
      bool converged = false;
      int it = 0;
      for (; it < opts.max_iter; ++it) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.value.size());
        for (size_t i = 0; i < atoms.size(); ++i) {
          const double wi = w(static_cast<int>(i));
          if (wi == 0.0) continue;
          g += wi * log_map(space, x, atoms[i]);
        }
        gn = tangent_norm(space, x, g);
        if (gn <= opts.tol) {
          converged = true;
          break;
        }
        x = exp_map(space, x, g);
      }
      if (!converged && it == opts.max_iter) {
        // one final gradient evaluation to report the state we stopped in
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.value.size());
        for (size_t i = 0; i < atoms.size(); ++i)
          g += w(static_cast<int>(i)) * log_map(space, x, atoms[i]);
        gn = tangent_norm(space, x, g);
        converged = gn <= opts.tol;
      }
      res.point = std::move(x);
      res.iterations = it;
      res.converged = converged;
      res.gradient_norm_final = gn;
      break;
    }
  }

  res.variance = variance_weighted(space, atoms, w, res.point);
  return res;
}

BarycenterResult barycenter(const Space& space, const ParticleMeasure& pm,
                            const BarycenterOptions& opts) {
  return barycenter_weighted(space, pm.atoms, pm.log_weights, opts);
}

std::string to_json_text(const BarycenterResult& result) {
  nlohmann::json j;
  j["point"] = std::vector<double>(result.point.value.data(),
                                   result.point.value.data() + result.point.value.size());
  j["variance"] = result.variance;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["gradient_norm_final"] = result.gradient_norm_final;
  return j.dump();
}

JensenReport jensen_check(const Space& space, const ParticleMeasure& pm, const LossFn& f,
                          double alpha) {
  JensenReport rep;
  const BarycenterResult bc = barycenter(space, pm);
  if (!bc.converged) {
    rep.conclusive = false;
    return rep;
  }
  rep.lhs = f(bc.point);
  const Eigen::VectorXd w = linear_weights(pm);
  double mean_f = 0.0;
  for (int i = 0; i < pm.size(); ++i) mean_f += w(i) * f(pm.atoms[i]);
  rep.rhs = mean_f - 0.5 * alpha * bc.variance;
  rep.slack = rep.rhs - rep.lhs;
  rep.pass = rep.slack >= -1e-8;
  return rep;
}

}  // namespace ewb
