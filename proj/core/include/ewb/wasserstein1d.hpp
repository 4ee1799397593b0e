#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "ewb/errors.hpp"

namespace ewb {

/// A square-integrable measure on the real line, represented by the values
/// of its quantile function at midpoints (i - 1/2)/K. Under this encoding
/// W2 is an L2 distance and barycenters are coordinate averages.
struct QuantileMeasure {
  Eigen::VectorXd q;  // nondecreasing

  int size() const { return static_cast<int>(q.size()); }
};

/// Validates monotonicity and finiteness.
QuantileMeasure quantile_measure(Eigen::VectorXd q);

/// Finitely supported measure on the space of quantile measures.
struct MetaMeasure {
  std::vector<QuantileMeasure> atoms;
  Eigen::VectorXd weights;  // normalized, nonnegative

  int size() const { return static_cast<int>(atoms.size()); }
};

MetaMeasure meta_measure(std::vector<QuantileMeasure> atoms, const Eigen::VectorXd& weights);

/// 2-Wasserstein distance via the quantile representation (the monotone
/// coupling is optimal on the line).
double w2(const QuantileMeasure& a, const QuantileMeasure& b);

/// Exact barycenter: the weighted average of the quantile vectors.
QuantileMeasure w2_barycenter(const MetaMeasure& p);

/// Variance functional of the meta-measure at mu: sum_i w_i W2^2(mu, mu_i).
double meta_variance_at(const MetaMeasure& p, const QuantileMeasure& mu);

/// Max pairwise W2 distance over the support.
double support_diameter(const MetaMeasure& p);

/// Strong-convexity modulus of the optimal Kantorovich potential from
/// mu_star to nu: the minimal slope of the monotone optimal map, read off
/// as the minimum ratio of consecutive quantile increments. mu_star must
/// be strictly increasing.
double potential_strong_convexity(const QuantileMeasure& mu_star, const QuantileMeasure& nu);

/// Variance inequality C_var W2^2(mu*, mu) <= int W2^2(mu, .) dP - V*_P.
struct StabilityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double c_var = 0.0;
  double v_star = 0.0;
  bool pass = false;
  bool conclusive = true;  // false when C_var = 0 (hypothesis fails)
};
StabilityReport barycenter_stability_check(const MetaMeasure& p, const QuantileMeasure& mu);

/// Mixability surrogate W2^2(mu*, mu) <= -(1/(C_var beta)) ln int
/// exp(-beta W2^2(mu, .)) dP, valid for beta <= 8 V*_P / Delta^4.
struct VarianceInequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double c_var = 0.0;
  double v_star = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  bool pass = false;
  bool conclusive = true;
};
VarianceInequalityReport variance_inequality_check(const MetaMeasure& p, const QuantileMeasure& mu,
                                                   double beta);

/// Concentration step behind the beta range:
/// (1/beta) ln int exp(-beta E_mu) dP <= beta Delta^4 / 8,
/// with E_mu(nu) = W2^2(mu, nu) - int W2^2(mu, .) dP.
struct HoeffdingReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};
HoeffdingReport hoeffding_step_check(const MetaMeasure& p, const QuantileMeasure& mu, double beta);

// CSV import/export: one column of K quantile values. A meta-measure is a
// directory of such files plus a weights JSON.
QuantileMeasure read_quantile_csv(std::istream& in);
void write_quantile_csv(const QuantileMeasure& m, std::ostream& out);
MetaMeasure read_meta_measure(const std::string& dir);
void write_meta_measure(const MetaMeasure& p, const std::string& dir);

}  // namespace ewb
