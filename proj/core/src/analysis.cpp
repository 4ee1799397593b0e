#include "ewb/analysis.hpp"

#include <cmath>
#include <functional>

namespace ewb {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr int kGridPoints = 33;

// Midpoint-convexity scan of g along sampled geodesics. Returns the raw
// worst violation of g(t_mid) <= (g(t_left) + g(t_right))/2 over all
// consecutive grid triples, with a tolerance scaled by the largest |g|.
CheckReport scan_convexity(const Space& space,
                           const std::function<double(const Point&, double, double)>& g,
                           int n_pairs, std::uint64_t seed) {
  Rng rng(seed);
  CheckReport rep;
  double scale = 0.0;
  struct Triple {
    Point x, y;
    double t;
    double viol;
  };
  Triple worst{{}, {}, 0.0, -1e300};
  std::vector<double> violations;
  violations.reserve(static_cast<size_t>(n_pairs) * (kGridPoints - 2));
  for (int pair = 0; pair < n_pairs; ++pair) {
    const Point x = sample_one(space, rng);
    const Point y = sample_one(space, rng);
    const double dxy = distance(space, x, y);
    double values[kGridPoints];
    for (int j = 0; j < kGridPoints; ++j) {
      const double t = static_cast<double>(j) / (kGridPoints - 1);
      const Point gt = geodesic_point(space, x, y, j == 0 ? 0.0 : (j == kGridPoints - 1 ? 1.0 : t));
      values[j] = g(gt, t, dxy);
      scale = std::max(scale, std::abs(values[j]));
    }
    for (int j = 0; j + 2 < kGridPoints; ++j) {
      const double viol = values[j + 1] - 0.5 * (values[j] + values[j + 2]);
      violations.push_back(viol);
      if (viol > worst.viol) {
        worst = {x, y, static_cast<double>(j + 1) / (kGridPoints - 1), viol};
      }
    }
  }
  rep.n_trials = static_cast<long>(violations.size());
  rep.tolerance = 1e-8 * (1.0 + scale);  // the tolerance needs the global scale
  for (const double v : violations) {
    if (v > rep.tolerance) ++rep.n_failures;
  }
  rep.worst_violation = worst.viol;
  rep.witness.points = {worst.x, worst.y};
  rep.witness.t = worst.t;
  rep.pass = rep.worst_violation <= rep.tolerance;
  return rep;
}

}  // namespace

CheckReport check_alpha_convex(const Space& space, const LossFn& f, double alpha, int n_pairs,
                               std::uint64_t seed) {
  auto g = [&](const Point& p, double t, double dxy) {
    const double d = t * dxy;  // d(gamma(0), gamma(t)) along a constant-speed geodesic
    return f(p) - 0.5 * alpha * d * d;
  };
  CheckReport rep = scan_convexity(space, g, n_pairs, seed);
  return rep;
}

CheckReport check_expconcave(const Space& space, const LossFn& f, double beta, int n_pairs,
                             std::uint64_t seed) {
  if (!(beta > 0)) throw DomainError("check_expconcave: beta must be positive");
  // concavity of exp(-beta f) == convexity of -exp(-beta f)
  auto g = [&](const Point& p, double, double) { return -std::exp(-beta * f(p)); };
  return scan_convexity(space, g, n_pairs, seed);
}

CheckReport check_curvature_bound(const Space& space, double kappa, CurvatureSide side,
                                  int n_triangles, std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  CheckReport rep;
  rep.tolerance = tolerance;
  const int t_grid = 17;
  for (int tri = 0; tri < n_triangles; ++tri) {
    Point p, x, y;
    double a = 0, b = 0, c = 0;
    for (;;) {
      p = sample_one(space, rng);
      x = sample_one(space, rng);
      y = sample_one(space, rng);
      a = distance(space, p, x);
      b = distance(space, p, y);
      c = distance(space, x, y);
      const double peri = a + b + c;
      const double tight = peri - 2.0 * std::max(a, std::max(b, c));
      if (std::min(a, std::min(b, c)) < 1e-12) continue;  // coincident vertices
      if (tight < 1e-12) continue;                        // collinear within tolerance
      if (kappa > 0 && peri >= 2.0 * model_diameter(kappa)) continue;
      break;
    }
    for (int j = 1; j < t_grid - 1; ++j) {
      const double t = static_cast<double>(j) / (t_grid - 1);
      const double dm = comparison_distance(kappa, a, b, c, t);
      const double dr = distance(space, p, geodesic_point(space, x, y, t));
      const double viol = (side == CurvatureSide::Lower) ? dm - dr : dr - dm;
      ++rep.n_trials;
      if (viol > rep.worst_violation) {
        rep.worst_violation = viol;
        rep.witness.points = {p, x, y};
        rep.witness.t = t;
      }
      if (viol > tolerance) ++rep.n_failures;
    }
  }
  rep.pass = rep.worst_violation <= rep.tolerance;
  return rep;
}

double psi(double r) {
  if (r < 0) throw DomainError("psi: r must be nonnegative");
  if (r == 0.0) return std::exp(-1.0);
  double f;  // r coth r
  if (r < 1e-4) {
    const double r2 = r * r;
    f = 1.0 + r2 / 3.0 - r2 * r2 / 45.0;
  } else {
    f = r / std::tanh(r);
  }
  return f * std::exp(-f);
}

McEstimate c_kappa_p_over(const Space& space, const std::vector<Point>& sample, const Point& x,
                          double kappa, double p) {
  if (!(p > 1)) throw DomainError("c_kappa_p: p must exceed 1");
  if (kappa >= 0) return {1.0, 0.0};
  const double scale = std::sqrt(-kappa / (p - 1.0));
  double sum = 0.0, sumsq = 0.0;
  for (const Point& y : sample) {
    const double v = psi(distance(space, x, y) * scale);
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(sample.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

McEstimate c_kappa_p(const Space& space, const Point& x, double kappa, double p, long n_mc,
                     std::uint64_t seed) {
  if (!(p > 1)) throw DomainError("c_kappa_p: p must exceed 1");
  if (kappa >= 0) return {1.0, 0.0};
  const double scale = std::sqrt(-kappa / (p - 1.0));
  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n_mc; ++i) {
    const Point y = sample_one(space, rng);
    const double v = psi(distance(space, x, y) * scale);
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(n_mc);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

double regret_bound_expconcave(double beta, double p, long n, double c_value) {
  if (!(beta > 0)) throw DomainError("regret bound: beta must be positive");
  if (n < 2) throw DomainError("regret bound: n must be >= 2");
  if (!(c_value > 0 && c_value <= 1)) throw DomainError("regret bound: c must lie in (0, 1]");
  return (2.0 + std::log(1.0 / c_value)) / beta + p * std::log(static_cast<double>(n)) / beta;
}

double adaptive_c1() { return std::pow(1.5, 0.25); }

double regret_bound_convex_bounded(double a, double b, double p, long n, double c_value) {
  if (!(a < b)) throw DomainError("regret bound: need a < b");
  if (n < 2) throw DomainError("regret bound: n must be >= 2");
  if (!(c_value > 0 && c_value <= 1)) throw DomainError("regret bound: c must lie in (0, 1]");
  const double ln_n = std::log(static_cast<double>(n));
  return (b - a) *
         (1.0 + adaptive_c1() * (1.0 + std::log(1.0 / c_value)) * std::sqrt(p * n * ln_n));
}

BallMassReport ball_mass_check(const Space& space, const Point& x, double r, double r0, double p,
                               double kappa, long n_mc, std::uint64_t seed) {
  if (!(r > 0 && r <= r0)) throw DomainError("ball_mass_check: need 0 < r <= r0");
  validate_point(space, x);
  Rng rng(seed);
  const double big = 2.0 * r0;
  long in_r = 0, in_big = 0;
  for (long i = 0; i < n_mc; ++i) {
    const Point y = sample_one(space, rng);
    const double d = distance(space, x, y);
    if (d < r) ++in_r;
    if (d < big) ++in_big;
  }
  const double n = static_cast<double>(n_mc);
  BallMassReport rep;
  rep.mass_r = in_r / n;
  rep.mass_big = in_big / n;
  double c_const = 1.0;
  if (kappa < 0) {
    c_const = std::pow(psi(2.0 * r0 * std::sqrt(-kappa / (p - 1.0))), p - 1.0);
  }
  const double q = c_const * std::pow(r / big, p);  // threshold = q * mass_big
  rep.c_x = c_const * rep.mass_big / std::pow(big, p);
  rep.threshold = q * rep.mass_big;
  // Var(p_r - q p_big) with both indicators from the same draws; B_r is
  // contained in B_big, so Cov(1_r, 1_big) = p_r (1 - p_big).
  const double p1 = rep.mass_r, p2 = rep.mass_big;
  const double var = (p1 * (1 - p1) + q * q * p2 * (1 - p2) - 2.0 * q * p1 * (1 - p2)) / n;
  rep.stderr_ = std::sqrt(std::max(0.0, var));
  rep.pass = rep.mass_r >= rep.threshold - 3.0 * rep.stderr_;
  return rep;
}

CheckReport contraction_ratio_check(const std::vector<double>& grid_r,
                                    const std::vector<double>& grid_eps, double tolerance) {
  CheckReport rep;
  rep.tolerance = tolerance;
  for (const double r : grid_r) {
    if (r < 0) throw DomainError("contraction_ratio_check: r must be nonnegative");
    for (const double eps : grid_eps) {
      if (!(eps > 0 && eps < 1)) continue;
      // sine part, valid on [0, pi]
      if (r <= kPi) {
        const double sr = std::sin(r);
        const double ratio = (r == 0.0) ? 1.0 : (sr > 0.0 ? std::sin(eps * r) / sr : 2.0);
        const double viol = eps - ratio;
        ++rep.n_trials;
        if (viol > rep.worst_violation) {
          rep.worst_violation = viol;
          rep.witness.r = r;
          rep.witness.eps = eps;
        }
        if (viol > tolerance) ++rep.n_failures;
      }
      // sinh part, valid for eps <= 1/2
      if (eps <= 0.5) {
        double ratio;
        if (r == 0.0) {
          ratio = 1.0;
        } else if (r <= 30.0) {
          ratio = std::sinh(eps * r) / std::sinh(r);
        } else {
          ratio = std::exp((eps - 1.0) * r) * (-std::expm1(-2.0 * eps * r)) / (-std::expm1(-2.0 * r));
        }
        const double viol = eps * psi(r) - ratio;
        ++rep.n_trials;
        if (viol > rep.worst_violation) {
          rep.worst_violation = viol;
          rep.witness.r = r;
          rep.witness.eps = eps;
        }
        if (viol > tolerance) ++rep.n_failures;
      }
    }
  }
  rep.pass = rep.n_failures == 0;
  return rep;
}

}  // namespace ewb
