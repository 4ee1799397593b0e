#include "ewb/batch.hpp"

#include <cmath>

namespace ewb {

BatchTask quadratic_task(const Space& space) {
  BatchTask task;
  task.name = "quadratic";
  task.loss = [space](const Point& theta, const Eigen::VectorXd& z) {
    const Point pz{space.kind, z};
    const double d = distance(space, pz, theta);
    return d * d;
  };
  task.sample = [space](Rng& rng) { return sample_one(space, rng).value; };
  const double diam = space.diameter;
  task.per_z_meta.lipschitz = 2.0 * diam;
  task.per_z_meta.range = std::make_pair(0.0, diam * diam);
  if (space.kappa <= 0) {
    task.per_z_meta.alpha = 2.0;
    task.per_z_meta.beta_expconcave = 1.0 / (2.0 * diam * diam);
  }
  if (space.kind == SpaceKind::Euclidean) {
    const int d = space.params.dim;
    const double r = space.params.radius;
    Point origin{SpaceKind::Euclidean, Eigen::VectorXd::Zero(d)};
    task.minimizer = origin;
    // E ||Z||^2 for Z uniform on the radius-r ball
    task.minimal_risk = r * r * d / (d + 2.0);
  }
  return task;
}

BatchResult online_to_batch(const Space& space, const Schedule& schedule, const BatchTask& task,
                            long n, int n_atoms, std::uint64_t seed, int n_jensen_probes) {
  if (n < 1) throw DomainError("online_to_batch: n must be >= 1");
  ForecasterState st = ewb_init(space, n_atoms, schedule, seed);
  Rng data_rng = Rng(seed).stream(StreamId::BatchData);

  BatchResult out;
  out.iterates.reserve(static_cast<size_t>(n) + 1);
  out.iterates.push_back(ewb_predict(st));
  for (long t = 1; t <= n; ++t) {
    const Eigen::VectorXd z = task.sample(data_rng);
    LossFn lf;
    lf.meta = task.per_z_meta;
    lf.eval = [&task, z](const Point& theta) { return task.loss(theta, z); };
    ewb_update(st, lf);
    out.iterates.push_back(ewb_predict(st));
  }

  out.theta_hat = barycenter(space, uniform_measure(out.iterates)).point;

  // Jensen step of the conversion proof, probed on fresh draws:
  // l(theta_hat, z) <= (1/(n+1)) sum_t l(theta_t, z).
  Rng probe_rng = Rng(seed).stream(StreamId::Probe);
  double worst = -1e300;
  for (int i = 0; i < n_jensen_probes; ++i) {
    const Eigen::VectorXd z = task.sample(probe_rng);
    double avg = 0.0;
    for (const Point& th : out.iterates) avg += task.loss(th, z);
    avg /= static_cast<double>(out.iterates.size());
    worst = std::max(worst, task.loss(out.theta_hat, z) - avg);
  }
  out.jensen_worst_gap = worst;
  out.jensen_ok = worst <= 1e-8;
  return out;
}

ExcessRiskReport excess_risk(const Space& space, const Point& theta_hat, const BatchTask& task,
                             long n_mc, std::uint64_t seed, double bound) {
  (void)space;
  ExcessRiskReport rep;
  rep.bound = bound;
  if (!task.minimal_risk) {
    rep.conclusive = false;
    return rep;
  }
  Rng rng = Rng(seed).stream(StreamId::RiskMc);
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n_mc; ++i) {
    const double v = task.loss(theta_hat, task.sample(rng));
    sum += v;
    sumsq += v * v;
  }
  const double nn = static_cast<double>(n_mc);
  const double mean = sum / nn;
  const double var = std::max(0.0, sumsq / nn - mean * mean);
  rep.estimate = mean - *task.minimal_risk;
  rep.stderr_ = std::sqrt(var / nn);
  return rep;
}

}  // namespace ewb
