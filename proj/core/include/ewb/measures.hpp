#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "ewb/geometry.hpp"

namespace ewb {

/// Weighted atom cloud. Weights are kept in log scale and normalized so
/// that logsumexp(log_weights) == 0; all reweighting happens in log space
/// so that thousands of accumulated losses cannot underflow.
struct ParticleMeasure {
  std::vector<Point> atoms;
  Eigen::VectorXd log_weights;

  int size() const { return static_cast<int>(atoms.size()); }
};

double log_sum_exp(const Eigen::VectorXd& v);

/// Builds a normalized measure from linear-scale weights.
/// Throws DegenerateMeasureError when every weight is zero.
ParticleMeasure from_atoms(std::vector<Point> atoms, const Eigen::VectorXd& weights);

ParticleMeasure uniform_measure(std::vector<Point> atoms);

/// Multiplies each weight by exp(-beta * loss) and renormalizes.
ParticleMeasure reweight(const ParticleMeasure& pm, const Eigen::VectorXd& loss_values,
                         double beta);

/// Weights proportional to prior-weight * exp(-beta_t * cumulative_loss).
/// This is the form the time-varying schedules use; it coincides with
/// iterated reweight() when beta is constant.
ParticleMeasure rebase_cumulative(const ParticleMeasure& prior,
                                  const Eigen::VectorXd& cumulative_losses, double beta_t);

/// Relative entropy of mu with respect to m on a shared atom list;
/// +infinity when mu puts mass where m has none.
double relative_entropy(const ParticleMeasure& mu, const ParticleMeasure& m);

/// 1 / sum of squared weights, in [1, N]; a degeneracy diagnostic only,
/// no resampling is ever triggered.
double effective_sample_size(const ParticleMeasure& pm);

Eigen::VectorXd linear_weights(const ParticleMeasure& pm);

/// One row per atom: coordinates..., log_weight.
void write_csv(const ParticleMeasure& pm, std::ostream& out);

}  // namespace ewb
