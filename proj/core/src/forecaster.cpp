#include "ewb/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ewb/analysis.hpp"

namespace ewb {

namespace {

Eigen::VectorXd evaluate_on_atoms(const std::vector<Point>& atoms, const LossFn& loss) {
  Eigen::VectorXd out(static_cast<int>(atoms.size()));
  for (size_t i = 0; i < atoms.size(); ++i) {
    const double v = loss(atoms[i]);
    if (std::isnan(v)) {
      throw LossEvaluationError("loss evaluated to NaN at atom " + std::to_string(i));
    }
    out(static_cast<int>(i)) = v;
  }
  return out;
}

double cumulative_loss_at(const std::vector<LossFn>& losses, std::int64_t upto, const Point& z) {
  double acc = 0.0;
  for (std::int64_t s = 0; s < upto; ++s) acc += losses[static_cast<size_t>(s)](z);
  return acc;
}

// Golden-section search for the minimum of phi on [0, 1]; phi is assumed
// unimodal (cumulative convex losses along a geodesic). Returns (t, value).
std::pair<double, double> golden_section(const std::function<double(double)>& phi, int depth) {
  const double gr = 0.6180339887498948482;
  double a = 0.0, b = 1.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int i = 0; i < depth; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi(d);
    }
  }
  return fc < fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

std::vector<int> smallest_k(const Eigen::VectorXd& values, int k) {
  std::vector<int> idx(values.size());
  for (int i = 0; i < values.size(); ++i) idx[i] = i;
  const int kk = std::min<int>(k, static_cast<int>(idx.size()));
  std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(),
                    [&](int a, int b) { return values(a) < values(b); });
  idx.resize(kk);
  return idx;
}

// Refines the hindsight minimum: golden-section searches along the
// geodesics between the best candidates, then two polish passes of line
// searches from the incumbent toward each candidate. L is the cumulative
// loss over losses[0..upto).
std::pair<Point, double> refine_between(const Space& space, const std::vector<Point>& pts,
                                        const std::vector<int>& order,
                                        const std::vector<LossFn>& losses, std::int64_t upto,
                                        int depth) {
  Point best_pt = pts[order[0]];
  double best_val = cumulative_loss_at(losses, upto, best_pt);
  auto search_segment = [&](const Point& u, const Point& v) {
    auto phi = [&](double t) {
      return cumulative_loss_at(losses, upto, geodesic_point(space, u, v, t));
    };
    const auto [t, val] = golden_section(phi, depth);
    if (val < best_val) {
      best_val = val;
      best_pt = geodesic_point(space, u, v, t);
    }
  };
  for (size_t i = 0; i < order.size(); ++i) {
    for (size_t j = i + 1; j < order.size(); ++j) {
      search_segment(pts[order[i]], pts[order[j]]);
    }
  }
  for (int polish = 0; polish < 2; ++polish) {
    const Point anchor = best_pt;
    for (const int idx : order) search_segment(anchor, pts[idx]);
  }
  return {best_pt, best_val};
}

}  // namespace

double Schedule::beta_at(std::int64_t t) const {
  if (t < 1) throw DomainError("beta_at: rounds are indexed from 1");
  if (kind == Kind::Constant) return beta;
  const double tt = static_cast<double>(t);
  const double ln = std::log(static_cast<double>(std::max<std::int64_t>(t, 2)));
  return (2.0 * adaptive_c1() / (range_b - range_a)) * std::sqrt(ln / tt);
}

Schedule Schedule::constant(double beta) {
  if (!(beta > 0)) throw DomainError("Schedule::constant: beta must be positive");
  Schedule s;
  s.kind = Kind::Constant;
  s.beta = beta;
  return s;
}

Schedule Schedule::adaptive(double a, double b) {
  if (!(a < b)) throw DomainError("Schedule::adaptive: need a < b");
  Schedule s;
  s.kind = Kind::Adaptive;
  s.range_a = a;
  s.range_b = b;
  return s;
}

ParticleMeasure ForecasterState::posterior() const {
  ParticleMeasure prior;
  prior.atoms = atoms;
  prior.log_weights = log_prior;
  return rebase_cumulative(prior, cumulative_losses, schedule.beta_at(t));
}

ForecasterState ewb_init(const Space& space, int n_atoms, const Schedule& schedule,
                         std::uint64_t seed) {
  if (n_atoms < 2) throw DomainError("ewb_init: need at least two atoms");
  ForecasterState st;
  st.space = space;
  st.schedule = schedule;
  st.atoms = sample_prior(space, n_atoms, derive_seed(seed, StreamId::Prior));
  st.log_prior = Eigen::VectorXd::Constant(n_atoms, -std::log(static_cast<double>(n_atoms)));
  st.cumulative_losses = Eigen::VectorXd::Zero(n_atoms);
  st.t = 1;
  return st;
}

Point ewb_predict(ForecasterState& state) {
  const double beta_t = state.schedule.beta_at(state.t);
  Eigen::VectorXd lw = state.log_prior - beta_t * state.cumulative_losses;
  lw.array() -= log_sum_exp(lw);
  BarycenterOptions opts;
  opts.init = state.warm_start;
  const BarycenterResult res = barycenter_weighted(state.space, state.atoms, lw, opts);
  state.warm_start = res.point;
  return res.point;
}

void ewb_update(ForecasterState& state, const LossFn& loss) {
  state.cumulative_losses += evaluate_on_atoms(state.atoms, loss);
  state.t += 1;
}

std::pair<Point, double> best_in_hindsight(const Space& space,
                                           const std::vector<Point>& candidates,
                                           const std::vector<LossFn>& losses, int refine_depth) {
  if (losses.empty()) throw DomainError("best_in_hindsight: no losses");
  if (candidates.empty()) throw DomainError("best_in_hindsight: no candidates");
  Eigen::VectorXd totals(static_cast<int>(candidates.size()));
  for (size_t i = 0; i < candidates.size(); ++i) {
    totals(static_cast<int>(i)) =
        cumulative_loss_at(losses, static_cast<std::int64_t>(losses.size()), candidates[i]);
  }
  const std::vector<int> order = smallest_k(totals, 5);
  Point best_pt = candidates[order[0]];
  double best_val = totals(order[0]);
  if (order.size() >= 2 && refine_depth > 0) {
    const auto [pt, val] = refine_between(space, candidates, order, losses,
                                          static_cast<std::int64_t>(losses.size()), refine_depth);
    if (val < best_val) {
      best_val = val;
      best_pt = pt;
    }
  }
  return {best_pt, best_val};
}

double default_c_value(const Space& space) {
  if (space.kappa >= 0) return 1.0;
  return psi(space.diameter * std::sqrt(-space.kappa / (space.dim_p - 1.0)));
}

RegretReport run_game(const Space& space, const Schedule& schedule,
                      const std::vector<LossFn>& losses, int n_atoms, std::uint64_t seed,
                      const RunOptions& opts) {
  ForecasterState st = ewb_init(space, n_atoms, schedule, seed);
  const std::int64_t n = static_cast<std::int64_t>(losses.size());
  const double c_value = opts.c_value > 0 ? opts.c_value : default_c_value(space);

  RegretReport rep;
  rep.rounds.reserve(static_cast<size_t>(n));

  // refined hindsight candidates accumulated at checkpoint rounds
  std::vector<Point> extras;
  std::vector<double> extras_cum;

  double cum_player = 0.0;
  double lhs_sum = 0.0;     // sum_t (1/beta_t) ln sum_i w_t(i) e^{-beta_t l_t(i)}
  double corr_total = 0.0;  // adaptive correction terms
  bool hoeffding_ok = true;

  const bool bounded = schedule.kind == Schedule::Kind::Adaptive;
  const double range_width = schedule.range_b - schedule.range_a;

  for (std::int64_t t = 1; t <= n; ++t) {
    const LossFn& loss_t = losses[static_cast<size_t>(t - 1)];
    const double beta_t = schedule.beta_at(t);

    Eigen::VectorXd lw = st.log_prior - beta_t * st.cumulative_losses;
    lw.array() -= log_sum_exp(lw);

    Point x_t;
    try {
      BarycenterOptions bopts;
      bopts.init = st.warm_start;
      const BarycenterResult res = barycenter_weighted(space, st.atoms, lw, bopts);
      if (!res.converged && opts.mode == RunMode::Verification) {
        throw ConvergenceError("barycenter did not converge at round " + std::to_string(t));
      }
      x_t = res.point;
      st.warm_start = x_t;
    } catch (const ConvergenceError& e) {
      rep.aborted = true;
      rep.abort_reason = e.what();
      break;
    }

    const double ess = std::exp(-log_sum_exp(2.0 * lw));
    const double loss_x = loss_t(x_t);
    cum_player += loss_x;

    const Eigen::VectorXd lvec = evaluate_on_atoms(st.atoms, loss_t);
    if (opts.mode == RunMode::Verification && loss_t.meta.range) {
      const auto [lo, hi] = *loss_t.meta.range;
      const double seen_lo = std::min(loss_x, lvec.minCoeff());
      const double seen_hi = std::max(loss_x, lvec.maxCoeff());
      if (seen_lo < lo - 1e-12 || seen_hi > hi + 1e-12) {
        throw LossEvaluationError("loss at round " + std::to_string(t) +
                                  " left its declared range");
      }
    }
    lhs_sum += log_sum_exp(lw - beta_t * lvec) / beta_t;
    const double mean_l = (lw.array().exp() * lvec.array()).sum();
    const double corr_t =
        log_sum_exp(lw + beta_t * (Eigen::VectorXd::Constant(lvec.size(), mean_l) - lvec)) / beta_t;
    corr_total += corr_t;
    if (bounded && corr_t > beta_t * range_width * range_width / 8.0 + 1e-12) {
      hoeffding_ok = false;
    }

    st.cumulative_losses += lvec;
    st.t = t + 1;

    for (size_t k = 0; k < extras.size(); ++k) extras_cum[k] += loss_t(extras[k]);

    // hindsight over atoms and refined extras
    double hs = st.cumulative_losses.minCoeff();
    for (const double v : extras_cum) hs = std::min(hs, v);

    const bool checkpoint = opts.refine_hindsight && ((t & (t - 1)) == 0 || t == n) && t >= 2;
    if (checkpoint) {
      const std::vector<int> order = smallest_k(st.cumulative_losses, 5);
      if (order.size() >= 2) {
        const auto [pt, val] = refine_between(space, st.atoms, order, losses, t, 20);
        if (val < hs) hs = val;
        extras.push_back(pt);
        extras_cum.push_back(val);
      }
    }

    RoundRecord row;
    row.t = t;
    row.beta_t = beta_t;
    row.loss = loss_x;
    row.cumloss = cum_player;
    row.regret = cum_player - hs;
    row.ess = ess;
    const std::int64_t horizon = std::max<std::int64_t>(t, 2);
    row.bound = (schedule.kind == Schedule::Kind::Constant)
                    ? regret_bound_expconcave(schedule.beta, space.dim_p, horizon, c_value)
                    : regret_bound_convex_bounded(schedule.range_a, schedule.range_b, space.dim_p,
                                                  horizon, c_value);
    rep.rounds.push_back(row);
  }

  rep.cumulative_loss = cum_player;
  if (rep.aborted) return rep;

  const std::int64_t played = static_cast<std::int64_t>(rep.rounds.size());
  const double beta_next = schedule.beta_at(played + 1);
  const double log_w_final = log_sum_exp(st.log_prior - beta_next * st.cumulative_losses);

  ProofChecks& pc = rep.proofs;
  pc.telescoping_lhs = -lhs_sum;
  pc.telescoping_rhs = -log_w_final / beta_next;
  pc.telescoping_ok = pc.telescoping_lhs <= pc.telescoping_rhs + 1e-9;

  pc.gibbs_lhs = cum_player;
  pc.correction_total = (schedule.kind == Schedule::Kind::Adaptive) ? corr_total : 0.0;
  pc.gibbs_rhs = pc.telescoping_rhs + pc.correction_total;
  pc.gibbs_ok = pc.gibbs_lhs <= pc.gibbs_rhs + 1e-8;
  pc.correction_hoeffding_ok = hoeffding_ok;

  // the Gibbs weights must attain the variational minimum among candidate
  // measures: point masses and a few random mixtures
  {
    const Eigen::VectorXd& L = st.cumulative_losses;
    double cand = std::numeric_limits<double>::infinity();
    for (int i = 0; i < L.size(); ++i) {
      cand = std::min(cand, L(i) - st.log_prior(i) / beta_next);
    }
    Rng mix_rng = Rng(seed).stream(StreamId::Mixtures);
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
      Eigen::VectorXd u(L.size());
      for (int i = 0; i < L.size(); ++i) u(i) = -std::log(std::max(mix_rng.uniform(), 1e-300));
      u /= u.sum();
      double val = 0.0;
      for (int i = 0; i < L.size(); ++i) {
        if (u(i) <= 0) continue;
        val += u(i) * L(i) + u(i) * (std::log(u(i)) - st.log_prior(i)) / beta_next;
      }
      cand = std::min(cand, val);
    }
    pc.candidate_min = cand;
    pc.variational_ok = pc.telescoping_rhs <= cand + 1e-10;
  }

  // final hindsight point: best atom or refined extra
  {
    int best_atom = 0;
    st.cumulative_losses.minCoeff(&best_atom);
    rep.hindsight_point = st.atoms[static_cast<size_t>(best_atom)];
    rep.hindsight_value = st.cumulative_losses(best_atom);
    for (size_t k = 0; k < extras.size(); ++k) {
      if (extras_cum[k] < rep.hindsight_value) {
        rep.hindsight_value = extras_cum[k];
        rep.hindsight_point = extras[k];
      }
    }
  }
  rep.regret = rep.cumulative_loss - rep.hindsight_value;
  return rep;
}

void write_csv(const RegretReport& report, std::ostream& out) {
  out << "t,beta_t,loss,cumloss,regret,bound,ess\n";
  char buf[512];
  for (const RoundRecord& r : report.rounds) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(r.t), r.beta_t, r.loss, r.cumloss, r.regret, r.bound,
                  r.ess);
    out << buf;
  }
}

std::string summary_json_text(const RegretReport& report) {
  nlohmann::json j;
  j["rounds"] = report.rounds.size();
  j["cumulative_loss"] = report.cumulative_loss;
  j["final_regret"] = report.regret;
  j["hindsight_value"] = report.hindsight_value;
  j["final_bound"] = report.rounds.empty() ? 0.0 : report.rounds.back().bound;
  j["aborted"] = report.aborted;
  if (report.aborted) j["abort_reason"] = report.abort_reason;
  j["proof_checks"] = {{"telescoping_ok", report.proofs.telescoping_ok},
                       {"gibbs_ok", report.proofs.gibbs_ok},
                       {"variational_ok", report.proofs.variational_ok},
                       {"hoeffding_ok", report.proofs.correction_hoeffding_ok}};
  return j.dump();
}

}  // namespace ewb
