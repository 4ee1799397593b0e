#pragma once

#include <cstdint>
#include <vector>

#include "ewb/loss.hpp"

namespace ewb {

struct CheckWitness {
  std::vector<Point> points;
  double t = 0.0;
  double r = 0.0;
  double eps = 0.0;
};

/// Outcome of a randomized inequality check. `worst_violation` is the raw
/// largest violation found (negative values mean the inequality held with
/// slack everywhere); the report passes iff worst_violation <= tolerance.
struct CheckReport {
  long n_trials = 0;
  long n_failures = 0;
  double worst_violation = -1e300;
  double tolerance = 0.0;
  CheckWitness witness;
  bool pass = true;
};

/// Samples geodesics from the prior and tests midpoint convexity of
/// t -> f(gamma(t)) - alpha/2 d^2(gamma(0), gamma(t)) on a 33-point grid.
CheckReport check_alpha_convex(const Space& space, const LossFn& f, double alpha, int n_pairs,
                               std::uint64_t seed);

/// Same grid machinery applied to concavity of exp(-beta f) along geodesics.
CheckReport check_expconcave(const Space& space, const LossFn& f, double beta, int n_pairs,
                             std::uint64_t seed);

enum class CurvatureSide { Lower, Upper };

/// Compares d(p, gamma(t)) on random triangles against the model-plane
/// value from the side lengths; direction per `side`. Degenerate triangles
/// are resampled.
CheckReport check_curvature_bound(const Space& space, double kappa, CurvatureSide side,
                                  int n_triangles, std::uint64_t seed, double tolerance = 1e-9);

/// (r coth r) exp(-r coth r), with psi(0) = 1/e; strictly decreasing on
/// the positive axis. Series branch below r = 1e-4.
double psi(double r);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Prior-dependent constant entering the negative-curvature regret bound:
/// exactly 1 for kappa >= 0, otherwise the Monte Carlo average of
/// psi(d(x, Y) sqrt(-kappa/(p-1))) over prior samples Y.
McEstimate c_kappa_p(const Space& space, const Point& x, double kappa, double p, long n_mc,
                     std::uint64_t seed);

/// Same average over an explicit sample (used with point masses and oracles).
McEstimate c_kappa_p_over(const Space& space, const std::vector<Point>& sample, const Point& x,
                          double kappa, double p);

/// Regret bound for expconcave losses at constant rate beta:
/// (2 + ln(1/c))/beta + p ln(n)/beta. Requires n >= 2 and c in (0, 1].
double regret_bound_expconcave(double beta, double p, long n, double c_value);

/// Regret bound for convex [a,b]-valued losses under the adaptive rate:
/// (b-a) [1 + c1 (1 + ln(1/c)) sqrt(p n ln n)] with c1 = (3/2)^(1/4).
double regret_bound_convex_bounded(double a, double b, double p, long n, double c_value);

/// The adaptive-rate constant (3/2)^(1/4) (~1.10668; often displayed as 1.1).
double adaptive_c1();

struct BallMassReport {
  double mass_r = 0.0;       // Monte Carlo estimate of m(B(x, r))
  double mass_big = 0.0;     // estimate of m(B(x, 2 r0))
  double c_x = 0.0;          // c(kappa,p,r0) * mass_big / (2 r0)^p
  double threshold = 0.0;    // c_x * r^p
  double stderr_ = 0.0;      // stderr of mass_r - threshold (same-sample, covariance-corrected)
  bool pass = false;         // mass_r >= threshold - 3 stderr
};

/// Verifies the ball-mass lower bound m(B(x,r)) >= c(x) r^p that the
/// regret analysis consumes, with c(x) built from m(B(x, 2 r0)) and the
/// psi-based constant for kappa < 0.
BallMassReport ball_mass_check(const Space& space, const Point& x, double r, double r0, double p,
                               double kappa, long n_mc, std::uint64_t seed);

/// Pointwise check of the two contraction-ratio inequalities behind the
/// ball-mass bounds: sin(eps r) / sin(r) >= eps on r in [0, pi] and
/// sinh(eps r) / sinh(r) >= eps psi(r) for eps <= 1/2, with 0/0 = 1.
CheckReport contraction_ratio_check(const std::vector<double>& grid_r,
                                    const std::vector<double>& grid_eps,
                                    double tolerance = 1e-12);

}  // namespace ewb
