#include "ewb/wasserstein1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ewb/measures.hpp"

namespace ewb {

namespace {

void check_same_grid(const QuantileMeasure& a, const QuantileMeasure& b) {
  if (a.size() != b.size()) {
    throw DomainError("quantile measures live on different grids (K mismatch)");
  }
}

bool strictly_increasing(const QuantileMeasure& q) {
  for (int i = 0; i + 1 < q.size(); ++i) {
    if (!(q.q(i) < q.q(i + 1))) return false;
  }
  return true;
}

}  // namespace

QuantileMeasure quantile_measure(Eigen::VectorXd q) {
  if (q.size() == 0) throw DomainError("quantile_measure: empty vector");
  if (!q.allFinite()) throw DomainError("quantile_measure: entries must be finite");
  for (int i = 0; i + 1 < q.size(); ++i) {
    if (q(i) > q(i + 1)) throw DomainError("quantile_measure: vector must be nondecreasing");
  }
  return QuantileMeasure{std::move(q)};
}

MetaMeasure meta_measure(std::vector<QuantileMeasure> atoms, const Eigen::VectorXd& weights) {
  if (atoms.empty()) throw DomainError("meta_measure: no atoms");
  if (static_cast<int>(atoms.size()) != weights.size()) {
    throw DomainError("meta_measure: atom and weight counts differ");
  }
  double total = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights(i) >= 0)) throw DomainError("meta_measure: weights must be nonnegative");
    total += weights(i);
  }
  if (!(total > 0)) throw DegenerateMeasureError("meta_measure: all weights vanish");
  const int k = atoms[0].size();
  for (const QuantileMeasure& a : atoms) {
    if (a.size() != k) throw DomainError("meta_measure: atoms live on different grids");
  }
  MetaMeasure p;
  p.atoms = std::move(atoms);
  p.weights = weights / total;
  return p;
}

double w2(const QuantileMeasure& a, const QuantileMeasure& b) {
  check_same_grid(a, b);
  return (a.q - b.q).norm() / std::sqrt(static_cast<double>(a.size()));
}

QuantileMeasure w2_barycenter(const MetaMeasure& p) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p.atoms[0].size());
  for (int i = 0; i < p.size(); ++i) mean += p.weights(i) * p.atoms[i].q;
  return QuantileMeasure{std::move(mean)};  // average of monotone stays monotone
}

double meta_variance_at(const MetaMeasure& p, const QuantileMeasure& mu) {
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double d = w2(mu, p.atoms[i]);
    acc += p.weights(i) * d * d;
  }
  return acc;
}

double support_diameter(const MetaMeasure& p) {
  double diam = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    for (int j = i + 1; j < p.size(); ++j) {
      diam = std::max(diam, w2(p.atoms[i], p.atoms[j]));
    }
  }
  return diam;
}

double potential_strong_convexity(const QuantileMeasure& mu_star, const QuantileMeasure& nu) {
  check_same_grid(mu_star, nu);
  const int k = mu_star.size();
  if (k < 2) throw DomainError("potential_strong_convexity: need K >= 2");
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < k; ++i) {
    const double cell = mu_star.q(i + 1) - mu_star.q(i);
    if (!(cell > 0)) {
      throw DomainError("potential_strong_convexity: mu_star has a zero-length cell");
    }
    alpha = std::min(alpha, (nu.q(i + 1) - nu.q(i)) / cell);
  }
  return std::max(0.0, alpha);
}

StabilityReport barycenter_stability_check(const MetaMeasure& p, const QuantileMeasure& mu) {
  StabilityReport rep;
  const QuantileMeasure mu_star = w2_barycenter(p);
  rep.v_star = meta_variance_at(p, mu_star);
  if (!strictly_increasing(mu_star)) {
    rep.conclusive = false;  // the optimal maps from mu* are not defined
    return rep;
  }
  double c_var = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    c_var += p.weights(i) * potential_strong_convexity(mu_star, p.atoms[i]);
  }
  rep.c_var = c_var;
  const double d = w2(mu_star, mu);
  rep.lhs = c_var * d * d;
  rep.rhs = meta_variance_at(p, mu) - rep.v_star;
  if (!(c_var > 0)) {
    rep.conclusive = false;
    return rep;
  }
  rep.pass = rep.lhs <= rep.rhs + 1e-8;
  return rep;
}

VarianceInequalityReport variance_inequality_check(const MetaMeasure& p, const QuantileMeasure& mu,
                                                   double beta) {
  VarianceInequalityReport rep;
  rep.beta = beta;
  const QuantileMeasure mu_star = w2_barycenter(p);
  rep.v_star = meta_variance_at(p, mu_star);
  rep.delta = support_diameter(p);
  if (!(beta > 0)) throw DomainError("variance_inequality_check: beta must be positive");
  if (rep.delta > 0) {
    const double beta_max = 8.0 * rep.v_star / std::pow(rep.delta, 4);
    if (beta > beta_max * (1.0 + 1e-12)) {
      throw DomainError("variance_inequality_check: beta exceeds 8 V*_P / Delta^4");
    }
  }
  if (p.size() == 1) {
    // point mass: mu* coincides with the single atom and all maps are trivial
    rep.c_var = 1.0;
  } else if (!strictly_increasing(mu_star)) {
    rep.conclusive = false;
    return rep;
  } else {
    double c_var = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      c_var += p.weights(i) * potential_strong_convexity(mu_star, p.atoms[i]);
    }
    rep.c_var = c_var;
  }
  if (!(rep.c_var > 0)) {
    rep.conclusive = false;
    return rep;
  }
  const double c_var = rep.c_var;
  const double d = w2(mu_star, mu);
  rep.lhs = d * d;
  Eigen::VectorXd expo(p.size());
  for (int i = 0; i < p.size(); ++i) {
    const double di = w2(mu, p.atoms[i]);
    expo(i) = std::log(p.weights(i) > 0 ? p.weights(i) : 1e-300) - beta * di * di;
  }
  rep.rhs = -log_sum_exp(expo) / (c_var * beta);
  rep.pass = rep.lhs <= rep.rhs + 1e-8;
  return rep;
}

HoeffdingReport hoeffding_step_check(const MetaMeasure& p, const QuantileMeasure& mu, double beta) {
  if (!(beta > 0)) throw DomainError("hoeffding_step_check: beta must be positive");
  HoeffdingReport rep;
  const double mean = meta_variance_at(p, mu);
  Eigen::VectorXd expo(p.size());
  for (int i = 0; i < p.size(); ++i) {
    const double di = w2(mu, p.atoms[i]);
    expo(i) = std::log(p.weights(i) > 0 ? p.weights(i) : 1e-300) - beta * (di * di - mean);
  }
  rep.lhs = log_sum_exp(expo) / beta;
  const double delta = support_diameter(p);
  rep.rhs = beta * std::pow(delta, 4) / 8.0;
  rep.pass = rep.lhs <= rep.rhs + 1e-8;
  return rep;
}

QuantileMeasure read_quantile_csv(std::istream& in) {
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vals.push_back(std::stod(line));
  }
  Eigen::VectorXd q = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
  return quantile_measure(std::move(q));
}

void write_quantile_csv(const QuantileMeasure& m, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < m.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", m.q(i));
    out << buf << '\n';
  }
}

MetaMeasure read_meta_measure(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream wf(fs::path(dir) / "weights.json");
  if (!wf) throw ConfigError("meta-measure directory has no weights.json");
  nlohmann::json j;
  wf >> j;
  std::vector<QuantileMeasure> atoms;
  std::vector<double> weights;
  for (const auto& entry : j.at("atoms")) {
    const std::string file = entry.at("file").get<std::string>();
    std::ifstream qf(fs::path(dir) / file);
    if (!qf) throw ConfigError("meta-measure atom file missing: " + file);
    atoms.push_back(read_quantile_csv(qf));
    weights.push_back(entry.at("weight").get<double>());
  }
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<int>(weights.size()));
  return meta_measure(std::move(atoms), w);
}

void write_meta_measure(const MetaMeasure& p, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json atoms = nlohmann::json::array();
  for (int i = 0; i < p.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "atom_%04d.csv", i);
    std::ofstream qf(fs::path(dir) / name);
    write_quantile_csv(p.atoms[i], qf);
    atoms.push_back({{"file", name}, {"weight", p.weights(i)}});
  }
  std::ofstream wf(fs::path(dir) / "weights.json");
  wf << nlohmann::json{{"atoms", atoms}}.dump(2) << '\n';
}

}  // namespace ewb
