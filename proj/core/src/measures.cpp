#include "ewb/measures.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace ewb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::VectorXd normalize_log(Eigen::VectorXd lw) {
  const double z = log_sum_exp(lw);
  if (!std::isfinite(z)) throw DegenerateMeasureError("all weights vanish");
  for (int i = 0; i < lw.size(); ++i) {
    lw(i) = (lw(i) == kNegInf) ? kNegInf : lw(i) - z;
  }
  return lw;
}

}  // namespace

double log_sum_exp(const Eigen::VectorXd& v) {
  if (v.size() == 0) return kNegInf;
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a NaN propagates)
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += std::exp(v(i) - m);
  return m + std::log(acc);
}

ParticleMeasure from_atoms(std::vector<Point> atoms, const Eigen::VectorXd& weights) {
  if (atoms.empty()) throw DegenerateMeasureError("no atoms");
  if (static_cast<int>(atoms.size()) != weights.size()) {
    throw DomainError("from_atoms: atom and weight counts differ");
  }
  for (size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].kind != atoms[0].kind || atoms[i].value.size() != atoms[0].value.size()) {
      throw SpaceMismatchError("from_atoms: atoms must all belong to one space");
    }
  }
  Eigen::VectorXd lw(weights.size());
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights(i) >= 0)) throw DomainError("from_atoms: weights must be nonnegative");
    lw(i) = weights(i) > 0 ? std::log(weights(i)) : kNegInf;
  }
  ParticleMeasure pm;
  pm.atoms = std::move(atoms);
  pm.log_weights = normalize_log(std::move(lw));
  return pm;
}

ParticleMeasure uniform_measure(std::vector<Point> atoms) {
  if (atoms.empty()) throw DegenerateMeasureError("no atoms");
  ParticleMeasure pm;
  const double lw = -std::log(static_cast<double>(atoms.size()));
  pm.log_weights = Eigen::VectorXd::Constant(static_cast<int>(atoms.size()), lw);
  pm.atoms = std::move(atoms);
  return pm;
}

ParticleMeasure reweight(const ParticleMeasure& pm, const Eigen::VectorXd& loss_values,
                         double beta) {
  if (loss_values.size() != pm.log_weights.size()) {
    throw DomainError("reweight: loss vector is not aligned with the atoms");
  }
  if (!(beta > 0)) throw DomainError("reweight: beta must be positive");
  for (int i = 0; i < loss_values.size(); ++i) {
    if (std::isnan(loss_values(i))) {
      throw LossEvaluationError("loss is NaN at atom " + std::to_string(i));
    }
  }
  ParticleMeasure out;
  out.atoms = pm.atoms;
  out.log_weights = normalize_log(pm.log_weights - beta * loss_values);
  return out;
}

ParticleMeasure rebase_cumulative(const ParticleMeasure& prior,
                                  const Eigen::VectorXd& cumulative_losses, double beta_t) {
  return reweight(prior, cumulative_losses, beta_t);
}

double relative_entropy(const ParticleMeasure& mu, const ParticleMeasure& m) {
  if (mu.size() != m.size()) {
    throw DomainError("relative_entropy: measures live on different atom lists");
  }
  double acc = 0.0;
  for (int i = 0; i < mu.log_weights.size(); ++i) {
    const double lmu = mu.log_weights(i);
    if (lmu == kNegInf) continue;  // 0 log 0 = 0
    const double lm = m.log_weights(i);
    if (lm == kNegInf) return std::numeric_limits<double>::infinity();
    acc += std::exp(lmu) * (lmu - lm);
  }
  return std::max(0.0, acc);
}

double effective_sample_size(const ParticleMeasure& pm) {
  return std::exp(-log_sum_exp(2.0 * pm.log_weights));
}

Eigen::VectorXd linear_weights(const ParticleMeasure& pm) {
  return pm.log_weights.array().exp().matrix();
}

void write_csv(const ParticleMeasure& pm, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < pm.size(); ++i) {
    const Eigen::VectorXd& v = pm.atoms[i].value;
    for (int j = 0; j < v.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", v(j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", pm.log_weights(i));
    out << buf << '\n';
  }
}

}  // namespace ewb
