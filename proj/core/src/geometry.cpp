#include "ewb/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ewb {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_kind(const Space& space, const Point& x) {
  if (x.kind != space.kind) {
    throw SpaceMismatchError("point kind " + to_string(x.kind) + " does not match space kind " +
                             to_string(space.kind));
  }
}

int expected_length(const Space& space) {
  switch (space.kind) {
    case SpaceKind::Euclidean: return space.params.dim;
    case SpaceKind::Sphere: return 3;
    case SpaceKind::Hyperbolic: return 3;
    case SpaceKind::Spd: return space.params.dim * space.params.dim;
    case SpaceKind::Quantile: return space.params.dim;
  }
  return 0;
}

// acosh(1 + u) for u >= 0, stable near zero.
double acosh1p(double u) {
  if (u < 0) u = 0;
  if (u < 1e-6) {
    const double s = std::sqrt(2.0 * u);
    return s * (1.0 - u / 12.0 + 3.0 * u * u / 160.0);
  }
  return std::acosh(1.0 + u);
}

double minkowski_sq(const Eigen::VectorXd& v) {
  return -v(0) * v(0) + v(1) * v(1) + v(2) * v(2);
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& flat, int n) {
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = flat(j * n + i);
  return m;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd flat(m.rows() * m.cols());
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) flat(j * m.rows() + i) = m(i, j);
  return flat;
}

Point renormalize_sphere(Eigen::Vector3d v) {
  v.normalize();
  Point p;
  p.kind = SpaceKind::Sphere;
  p.value = v;
  return p;
}

Point renormalize_hyperboloid(Eigen::VectorXd v) {
  const double q = -minkowski_sq(v);
  if (q <= 0) throw DomainError("vector left the hyperboloid sheet");
  v /= std::sqrt(q);
  if (v(0) < 0) v = -v;
  Point p;
  p.kind = SpaceKind::Hyperbolic;
  p.value = std::move(v);
  return p;
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Euclidean: return "euclidean";
    case SpaceKind::Sphere: return "sphere";
    case SpaceKind::Hyperbolic: return "hyperbolic";
    case SpaceKind::Spd: return "spd";
    case SpaceKind::Quantile: return "quantile";
  }
  return "unknown";
}

SpaceKind space_kind_from_string(const std::string& name) {
  if (name == "euclidean") return SpaceKind::Euclidean;
  if (name == "sphere") return SpaceKind::Sphere;
  if (name == "hyperbolic") return SpaceKind::Hyperbolic;
  if (name == "spd") return SpaceKind::Spd;
  if (name == "quantile") return SpaceKind::Quantile;
  throw ConfigError("unknown space kind '" + name + "'");
}

Space Space::euclidean_ball(int dim, double radius) {
  if (dim < 1) throw DomainError("euclidean_ball: dim must be >= 1");
  if (radius <= 0) throw DomainError("euclidean_ball: radius must be positive");
  Space s;
  s.kind = SpaceKind::Euclidean;
  // the measure-contraction dimension parameter must exceed 1; a convex set
  // in R^d with uniform measure satisfies the property for any p >= d
  s.dim_p = std::max(2.0, static_cast<double>(dim));
  s.kappa = 0.0;
  s.diameter = 2.0 * radius;
  s.params.dim = dim;
  s.params.radius = radius;
  return s;
}

Space Space::sphere_cap(double cap_angle) {
  if (!(cap_angle > 0 && cap_angle < kPi / 2)) {
    throw DomainError("sphere_cap: cap angle must lie in (0, pi/2)");
  }
  Space s;
  s.kind = SpaceKind::Sphere;
  s.dim_p = 2.0;
  s.kappa = 1.0;
  s.diameter = 2.0 * cap_angle;
  s.params.cap_angle = cap_angle;
  // Bonnet-Myers: diameter <= pi sqrt((p-1)/kappa)
  if (s.diameter > kPi * std::sqrt((s.dim_p - 1.0) / s.kappa)) {
    throw DomainError("sphere_cap: diameter exceeds the Bonnet-Myers bound");
  }
  return s;
}

Space Space::hyperbolic_disk(double radius) {
  if (radius <= 0) throw DomainError("hyperbolic_disk: radius must be positive");
  Space s;
  s.kind = SpaceKind::Hyperbolic;
  s.dim_p = 2.0;
  s.kappa = -1.0;
  s.diameter = 2.0 * radius;
  s.params.radius = radius;
  return s;
}

Space Space::spd_log_box(int n, double log_halfwidth) {
  if (n < 2) throw DomainError("spd_log_box: matrix size must be >= 2");
  if (log_halfwidth <= 0) throw DomainError("spd_log_box: box half-width must be positive");
  Space s;
  s.kind = SpaceKind::Spd;
  s.dim_p = n * (n + 1) / 2.0;
  s.kappa = 0.0;
  // max Frobenius distance between two symmetric matrices whose free
  // entries each lie in [-w, w]
  s.diameter = 2.0 * log_halfwidth * n;
  s.params.dim = n;
  s.params.log_halfwidth = log_halfwidth;
  return s;
}

Space Space::quantile_box(int k, double q_min, double q_max) {
  if (k < 1) throw DomainError("quantile_box: K must be >= 1");
  if (!(q_min < q_max)) throw DomainError("quantile_box: need q_min < q_max");
  Space s;
  s.kind = SpaceKind::Quantile;
  s.dim_p = static_cast<double>(std::max(k, 2));
  s.kappa = 0.0;
  s.diameter = q_max - q_min;
  s.params.dim = k;
  s.params.q_min = q_min;
  s.params.q_max = q_max;
  return s;
}

double minkowski_dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return -x(0) * y(0) + x(1) * y(1) + x(2) * y(2);
}

Eigen::VectorXd sym_log_flat(const Eigen::VectorXd& flat, int n) {
  const Eigen::MatrixXd m = unflatten(flat, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  for (int i = 0; i < n; ++i) {
    if (ev(i) <= 0) throw DomainError("spd point has a non-positive eigenvalue");
  }
  const Eigen::MatrixXd lg =
      es.eigenvectors() * ev.array().log().matrix().asDiagonal() * es.eigenvectors().transpose();
  return flatten(lg);
}

Eigen::VectorXd sym_exp_flat(const Eigen::VectorXd& flat, int n) {
  const Eigen::MatrixXd m = unflatten(flat, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::MatrixXd ex = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                             es.eigenvectors().transpose();
  return flatten(ex);
}

bool contains(const Space& space, const Point& x, double slack) {
  if (x.kind != space.kind) return false;
  if (x.value.size() != expected_length(space)) return false;
  if (!x.value.allFinite()) return false;
  switch (space.kind) {
    case SpaceKind::Euclidean:
      return x.value.norm() <= space.params.radius + slack;
    case SpaceKind::Sphere: {
      if (std::abs(x.value.norm() - 1.0) > 1e-12) return false;  // unit-norm invariant
      return x.value(2) >= std::cos(space.params.cap_angle) - slack;
    }
    case SpaceKind::Hyperbolic: {
      if (x.value(0) <= 0) return false;
      if (std::abs(minkowski_sq(x.value) + 1.0) > 1e-10) return false;  // sheet invariant
      return acosh1p(x.value(0) - 1.0) <= space.params.radius + slack;
    }
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      Eigen::MatrixXd m = unflatten(x.value, n);
      if ((m - m.transpose()).norm() > 1e-10) return false;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
      if (es.eigenvalues().minCoeff() <= 0) return false;
      const Eigen::VectorXd lg = sym_log_flat(x.value, n);
      return unflatten(lg, n).cwiseAbs().maxCoeff() <= space.params.log_halfwidth + slack;
    }
    case SpaceKind::Quantile: {
      for (int i = 0; i + 1 < x.value.size(); ++i) {
        if (x.value(i) > x.value(i + 1) + slack) return false;
      }
      return x.value.minCoeff() >= space.params.q_min - slack &&
             x.value.maxCoeff() <= space.params.q_max + slack;
    }
  }
  return false;
}

void validate_point(const Space& space, const Point& x) {
  check_kind(space, x);
  if (x.value.size() != expected_length(space)) {
    throw DomainError("point has wrong number of coordinates for " + to_string(space.kind));
  }
  if (!contains(space, x)) {
    throw DomainError("point violates the domain constraints of " + to_string(space.kind));
  }
}

double distance(const Space& space, const Point& x, const Point& y) {
  check_kind(space, x);
  check_kind(space, y);
  switch (space.kind) {
    case SpaceKind::Euclidean:
      return (x.value - y.value).norm();
    case SpaceKind::Quantile:
      return (x.value - y.value).norm() / std::sqrt(static_cast<double>(space.params.dim));
    case SpaceKind::Sphere: {
      const Eigen::Vector3d a = x.value, b = y.value;
      return std::atan2(a.cross(b).norm(), a.dot(b));
    }
    case SpaceKind::Hyperbolic: {
      const Eigen::VectorXd d = x.value - y.value;
      return acosh1p(0.5 * std::max(0.0, minkowski_sq(d)));
    }
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      return (sym_log_flat(x.value, n) - sym_log_flat(y.value, n)).norm();
    }
  }
  return 0.0;
}

Point geodesic_point(const Space& space, const Point& x, const Point& y, double t) {
  check_kind(space, x);
  check_kind(space, y);
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter t must lie in [0, 1]");
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  switch (space.kind) {
    case SpaceKind::Euclidean:
    case SpaceKind::Quantile: {
      Point p;
      p.kind = space.kind;
      p.value = (1.0 - t) * x.value + t * y.value;
      return p;
    }
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      Point p;
      p.kind = space.kind;
      p.value = sym_exp_flat((1.0 - t) * sym_log_flat(x.value, n) + t * sym_log_flat(y.value, n), n);
      return p;
    }
    case SpaceKind::Sphere: {
      const double theta = distance(space, x, y);
      if (theta > kPi - 1e-9) {
        throw NonUniqueGeodesicError("antipodal sphere points have no unique geodesic");
      }
      if (theta < 1e-9) {
        return renormalize_sphere((1.0 - t) * x.value + t * y.value);
      }
      const double s = std::sin(theta);
      return renormalize_sphere((std::sin((1.0 - t) * theta) * x.value + std::sin(t * theta) * y.value) / s);
    }
    case SpaceKind::Hyperbolic: {
      const double d = distance(space, x, y);
      if (d < 1e-12) {
        return renormalize_hyperboloid((1.0 - t) * x.value + t * y.value);
      }
      const double s = std::sinh(d);
      return renormalize_hyperboloid((std::sinh((1.0 - t) * d) * x.value + std::sinh(t * d) * y.value) / s);
    }
  }
  return x;
}

Point homothety(const Space& space, const Point& center, const Point& y, double eps) {
  return geodesic_point(space, center, y, eps);
}

Eigen::VectorXd log_map(const Space& space, const Point& base, const Point& target) {
  check_kind(space, base);
  check_kind(space, target);
  switch (space.kind) {
    case SpaceKind::Euclidean:
    case SpaceKind::Quantile:
      return target.value - base.value;
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      return sym_log_flat(target.value, n) - sym_log_flat(base.value, n);
    }
    case SpaceKind::Sphere: {
      const double theta = distance(space, base, target);
      Eigen::VectorXd w = target.value - base.value * base.value.dot(target.value);
      const double nw = w.norm();
      if (nw < 1e-300 || theta < 1e-300) return Eigen::VectorXd::Zero(3);
      return w * (theta / nw);
    }
    case SpaceKind::Hyperbolic: {
      const double d = distance(space, base, target);
      const double c = -minkowski_dot(base.value, target.value);
      Eigen::VectorXd w = target.value - c * base.value;
      const double nw = std::sqrt(std::max(0.0, minkowski_sq(w)));
      if (nw < 1e-300 || d < 1e-300) return Eigen::VectorXd::Zero(3);
      return w * (d / nw);
    }
  }
  return Eigen::VectorXd();
}

Point exp_map(const Space& space, const Point& base, const Eigen::VectorXd& tangent) {
  check_kind(space, base);
  switch (space.kind) {
    case SpaceKind::Euclidean:
    case SpaceKind::Quantile: {
      Point p;
      p.kind = space.kind;
      p.value = base.value + tangent;
      return p;
    }
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      Point p;
      p.kind = space.kind;
      p.value = sym_exp_flat(sym_log_flat(base.value, n) + tangent, n);
      return p;
    }
    case SpaceKind::Sphere: {
      // drop any normal component picked up by rounding
      Eigen::VectorXd v = tangent - base.value * base.value.dot(tangent);
      const double nv = v.norm();
      if (nv < 1e-14) return renormalize_sphere(base.value + v);
      return renormalize_sphere(std::cos(nv) * base.value + (std::sin(nv) / nv) * v);
    }
    case SpaceKind::Hyperbolic: {
      Eigen::VectorXd v = tangent + minkowski_dot(base.value, tangent) * base.value;
      const double nv = std::sqrt(std::max(0.0, minkowski_sq(v)));
      if (nv < 1e-14) return renormalize_hyperboloid(base.value + v);
      return renormalize_hyperboloid(std::cosh(nv) * base.value + (std::sinh(nv) / nv) * v);
    }
  }
  return base;
}

double tangent_norm(const Space& space, const Point& base, const Eigen::VectorXd& tangent) {
  (void)base;
  if (space.kind == SpaceKind::Hyperbolic) {
    return std::sqrt(std::max(0.0, minkowski_sq(tangent)));
  }
  if (space.kind == SpaceKind::Quantile) {
    return tangent.norm() / std::sqrt(static_cast<double>(space.params.dim));
  }
  return tangent.norm();
}

double s_kappa(double kappa, double r) {
  if (r < 0) throw DomainError("s_kappa: r must be nonnegative");
  const double kr2 = kappa * r * r;
  if (std::abs(kr2) < 1e-8) {
    return r * (1.0 - kr2 / 6.0 + kr2 * kr2 / 120.0);
  }
  if (kappa > 0) {
    const double sk = std::sqrt(kappa);
    return std::sin(r * sk) / sk;
  }
  const double sk = std::sqrt(-kappa);
  return std::sinh(r * sk) / sk;
}

double model_diameter(double kappa) {
  if (kappa <= 0) return std::numeric_limits<double>::infinity();
  return kPi / std::sqrt(kappa);
}

double comparison_distance(double kappa, double side_px, double side_py, double side_xy, double t) {
  const double a = side_px, b = side_py, c = side_xy;
  if (a < 0 || b < 0 || c < 0) throw DomainError("comparison_distance: sides must be nonnegative");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("comparison_distance: t must lie in [0, 1]");
  const double peri = a + b + c;
  const double tri_slack = 1e-9 * (1.0 + peri);
  if (a + b < c - tri_slack || a + c < b - tri_slack || b + c < a - tri_slack) {
    throw DomainError("comparison_distance: sides violate the triangle inequality");
  }
  if (kappa > 0 && peri >= 2.0 * model_diameter(kappa)) {
    throw DomainError("comparison_distance: perimeter too large for the model plane");
  }
  const double side_max = std::max(a, std::max(b, c));
  if (std::abs(kappa) * side_max * side_max < 1e-12) {
    const double d2 = (1.0 - t) * a * a + t * b * b - t * (1.0 - t) * c * c;
    return std::sqrt(std::max(0.0, d2));
  }
  if (kappa > 0) {
    const double s = std::sqrt(kappa);
    const double ca = std::cos(a * s), sa = std::sin(a * s);
    const double cc = std::cos(c * s), sc = std::sin(c * s);
    if (a * s < 1e-12) return t * c;
    if (c * s < 1e-12) return a;
    double cos_alpha = (std::cos(b * s) - ca * cc) / (sa * sc);
    cos_alpha = std::clamp(cos_alpha, -1.0, 1.0);
    const double ct = std::cos(t * c * s), st = std::sin(t * c * s);
    const double cos_d = std::clamp(ca * ct + sa * st * cos_alpha, -1.0, 1.0);
    return std::acos(cos_d) / s;
  }
  const double s = std::sqrt(-kappa);
  const double cha = std::cosh(a * s), sha = std::sinh(a * s);
  const double chc = std::cosh(c * s), shc = std::sinh(c * s);
  if (a * s < 1e-12) return t * c;
  if (c * s < 1e-12) return a;
  double cos_alpha = (cha * chc - std::cosh(b * s)) / (sha * shc);
  cos_alpha = std::clamp(cos_alpha, -1.0, 1.0);
  const double cht = std::cosh(t * c * s), sht = std::sinh(t * c * s);
  const double ch_d = std::max(1.0, cha * cht - sha * sht * cos_alpha);
  return std::acosh(ch_d) / s;
}

Point sample_one(const Space& space, Rng& rng) {
  Point p;
  p.kind = space.kind;
  switch (space.kind) {
    case SpaceKind::Euclidean: {
      const int d = space.params.dim;
      Eigen::VectorXd dir(d);
      double nrm = 0.0;
      do {
        for (int i = 0; i < d; ++i) dir(i) = rng.normal();
        nrm = dir.norm();
      } while (nrm < 1e-300);
      const double r = space.params.radius * std::pow(rng.uniform(), 1.0 / d);
      p.value = dir * (r / nrm);
      return p;
    }
    case SpaceKind::Sphere: {
      const double z0 = std::cos(space.params.cap_angle);
      const double z = 1.0 - rng.uniform() * (1.0 - z0);
      const double phi = 2.0 * kPi * rng.uniform();
      const double sz = std::sqrt(std::max(0.0, 1.0 - z * z));
      p.value = Eigen::Vector3d(sz * std::cos(phi), sz * std::sin(phi), z);
      return p;
    }
    case SpaceKind::Hyperbolic: {
      const double r = acosh1p(rng.uniform() * (std::cosh(space.params.radius) - 1.0));
      const double phi = 2.0 * kPi * rng.uniform();
      const double sh = std::sinh(r);
      p.value = Eigen::VectorXd(3);
      p.value << std::cosh(r), sh * std::cos(phi), sh * std::sin(phi);
      return p;
    }
    case SpaceKind::Spd: {
      const int n = space.params.dim;
      const double w = space.params.log_halfwidth;
      Eigen::MatrixXd s(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          s(i, j) = rng.uniform(-w, w);
          s(j, i) = s(i, j);
        }
      }
      p.value = sym_exp_flat(flatten(s), n);
      return p;
    }
    case SpaceKind::Quantile: {
      const int k = space.params.dim;
      std::vector<double> q(k);
      for (int i = 0; i < k; ++i) q[i] = rng.uniform(space.params.q_min, space.params.q_max);
      std::sort(q.begin(), q.end());
      p.value = Eigen::Map<Eigen::VectorXd>(q.data(), k);
      return p;
    }
  }
  return p;
}

std::vector<Point> sample_prior(const Space& space, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_prior: n must be >= 1");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(sample_one(space, rng));
  return out;
}

std::string to_json_text(const Space& space) {
  nlohmann::json j;
  j["kind"] = to_string(space.kind);
  j["p"] = space.dim_p;
  j["kappa"] = space.kappa;
  j["diameter"] = space.diameter;
  nlohmann::json params;
  switch (space.kind) {
    case SpaceKind::Euclidean:
      params["dim"] = space.params.dim;
      params["radius"] = space.params.radius;
      break;
    case SpaceKind::Sphere:
      params["cap_angle"] = space.params.cap_angle;
      break;
    case SpaceKind::Hyperbolic:
      params["radius"] = space.params.radius;
      break;
    case SpaceKind::Spd:
      params["dim"] = space.params.dim;
      params["log_halfwidth"] = space.params.log_halfwidth;
      break;
    case SpaceKind::Quantile:
      params["k"] = space.params.dim;
      params["q_min"] = space.params.q_min;
      params["q_max"] = space.params.q_max;
      break;
  }
  j["params"] = params;
  return j.dump();
}

Space space_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("space descriptor: ") + e.what());
  }
  try {
    const SpaceKind kind = space_kind_from_string(j.at("kind").get<std::string>());
    const nlohmann::json& params = j.at("params");
    Space s;
    switch (kind) {
      case SpaceKind::Euclidean:
        s = Space::euclidean_ball(params.at("dim").get<int>(), params.at("radius").get<double>());
        break;
      case SpaceKind::Sphere:
        s = Space::sphere_cap(params.at("cap_angle").get<double>());
        break;
      case SpaceKind::Hyperbolic:
        s = Space::hyperbolic_disk(params.at("radius").get<double>());
        break;
      case SpaceKind::Spd:
        s = Space::spd_log_box(params.at("dim").get<int>(), params.at("log_halfwidth").get<double>());
        break;
      case SpaceKind::Quantile:
        s = Space::quantile_box(params.at("k").get<int>(), params.at("q_min").get<double>(),
                                params.at("q_max").get<double>());
        break;
    }
    // optional fields may override the derived values, but must stay consistent
    if (j.contains("p") && std::abs(j["p"].get<double>() - s.dim_p) > 1e-9) {
      throw ConfigError("space descriptor: field 'p' is inconsistent with the parameters");
    }
    if (j.contains("kappa") && std::abs(j["kappa"].get<double>() - s.kappa) > 1e-9) {
      throw ConfigError("space descriptor: field 'kappa' is inconsistent with the parameters");
    }
    if (j.contains("diameter") && std::abs(j["diameter"].get<double>() - s.diameter) > 1e-9) {
      throw ConfigError("space descriptor: field 'diameter' is inconsistent with the parameters");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("space descriptor: ") + e.what());
  }
}

}  // namespace ewb
