#include "ewb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ewb/analysis.hpp"

namespace ewb {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json space_json(const Space& s) { return json::parse(to_json_text(s)); }

json schedule_json(const Schedule& s) {
  if (s.kind == Schedule::Kind::Constant) {
    return json{{"kind", "constant"}, {"beta", s.beta}};
  }
  return json{{"kind", "adaptive"}, {"a", s.range_a}, {"b", s.range_b}};
}

Schedule schedule_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Schedule::constant(j.at("beta").get<double>());
  if (kind == "adaptive") return Schedule::adaptive(j.at("a").get<double>(), j.at("b").get<double>());
  throw ConfigError("unknown schedule kind '" + kind + "'");
}

std::string mode_name(ConfigMode m) {
  switch (m) {
    case ConfigMode::Experiment: return "experiment";
    case ConfigMode::Verify: return "verify";
    case ConfigMode::Batch: return "batch";
  }
  return "experiment";
}

ConfigMode mode_from_name(const std::string& name) {
  if (name == "experiment") return ConfigMode::Experiment;
  if (name == "verify") return ConfigMode::Verify;
  if (name == "batch") return ConfigMode::Batch;
  throw ConfigError("unknown mode '" + name + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.rounds < 1) throw ConfigError("rounds must be >= 1");
  if (c.n_atoms < 2) throw ConfigError("n_atoms must be >= 2");
  if (c.seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (c.loss_family != "squared_distance" && c.loss_family != "scaled_distance") {
    throw ConfigError("unknown loss family '" + c.loss_family + "'");
  }
  if (c.out_dir.empty()) throw ConfigError("out_dir must be nonempty");
  if (c.mode == ConfigMode::Batch) {
    if (c.batch.replications < 1) throw ConfigError("batch.replications must be >= 1");
    if (c.batch.n < 1) throw ConfigError("batch.n must be >= 1");
    if (c.batch.n_mc < 1) throw ConfigError("batch.n_mc must be >= 1");
  }
}

json check_to_json(const CheckReport& r) {
  return json{{"pass", r.pass},
              {"n_trials", r.n_trials},
              {"n_failures", r.n_failures},
              {"worst_violation", r.worst_violation},
              {"tolerance", r.tolerance}};
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  try {
    ExperimentConfig c;
    if (j.contains("mode")) c.mode = mode_from_name(j["mode"].get<std::string>());
    c.space = space_from_json_text(j.at("space").dump());
    c.schedule = schedule_from_json(j.at("schedule"));
    if (j.contains("loss")) c.loss_family = j["loss"].at("family").get<std::string>();
    c.rounds = j.at("rounds").get<long>();
    c.n_atoms = j.value("n_atoms", 10000);
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.out_dir = j.value("out_dir", std::string("out"));
    if (j.contains("batch")) {
      c.batch.replications = j["batch"].value("replications", 20L);
      c.batch.n = j["batch"].value("n", 500L);
      c.batch.n_mc = j["batch"].value("n_mc", 100000L);
    }
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

std::string to_json_text(const ExperimentConfig& c) {
  json j;
  j["mode"] = mode_name(c.mode);
  j["space"] = space_json(c.space);
  j["schedule"] = schedule_json(c.schedule);
  j["loss"] = json{{"family", c.loss_family}};
  j["rounds"] = c.rounds;
  j["n_atoms"] = c.n_atoms;
  j["seeds"] = c.seeds;
  j["out_dir"] = c.out_dir;
  j["batch"] = json{{"replications", c.batch.replications}, {"n", c.batch.n}, {"n_mc", c.batch.n_mc}};
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return config_from_json_text(text);
  } catch (const ConfigError& e) {
    // anchor the message to path:line when the parser reported a position
    const std::string msg = e.what();
    const auto pos = msg.find("at line ");
    if (pos != std::string::npos) {
      const long line = std::strtol(msg.c_str() + pos + 8, nullptr, 10);
      throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
    }
    throw ConfigError(path + ": " + msg);
  }
}

std::vector<LossFn> make_loss_sequence(const Space& space, const std::string& family, long rounds,
                                       std::uint64_t seed) {
  const std::vector<Point> centers = sample_prior(space, static_cast<int>(rounds), seed);
  std::vector<LossFn> losses;
  losses.reserve(static_cast<size_t>(rounds));
  for (const Point& c : centers) {
    if (family == "squared_distance") {
      losses.push_back(squared_distance_loss(space, c));
    } else if (family == "scaled_distance") {
      losses.push_back(scaled_distance_loss(space, c));
    } else {
      throw ConfigError("unknown loss family '" + family + "'");
    }
  }
  return losses;
}

int run_experiment(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  json per_seed = json::array();
  std::vector<std::string> files;
  std::vector<std::vector<double>> regret_by_seed;
  std::vector<double> bound_by_round;
  bool all_proofs_ok = true;
  bool within_bound = true;
  double mean_final = 0.0, max_final = -1e300, final_bound = 0.0;
  bool any_aborted = false;

  for (const std::uint64_t seed : config.seeds) {
    const std::vector<LossFn> losses = make_loss_sequence(
        config.space, config.loss_family, config.rounds, derive_seed(seed, StreamId::LossCenters));
    RunOptions opts;
    opts.mode = RunMode::Experiment;
    const RegretReport rep = run_game(config.space, config.schedule, losses, config.n_atoms, seed, opts);

    const std::string name = "regret_seed" + std::to_string(seed) + ".csv";
    std::ofstream out(fs::path(config.out_dir) / name, std::ios::binary);
    write_csv(rep, out);
    files.push_back(name);

    json entry = json::parse(summary_json_text(rep));
    entry["seed"] = seed;
    if (rep.aborted) {
      any_aborted = true;
      per_seed.push_back(entry);
      continue;
    }

    double max_ratio = 0.0;
    std::vector<double> regrets;
    regrets.reserve(rep.rounds.size());
    for (const RoundRecord& r : rep.rounds) {
      regrets.push_back(r.regret);
      if (r.t >= 2) max_ratio = std::max(max_ratio, r.regret / r.bound);
    }
    regret_by_seed.push_back(std::move(regrets));
    if (bound_by_round.empty()) {
      for (const RoundRecord& r : rep.rounds) bound_by_round.push_back(r.bound);
    }
    const bool proofs_ok = rep.proofs.telescoping_ok && rep.proofs.gibbs_ok &&
                           rep.proofs.variational_ok && rep.proofs.correction_hoeffding_ok;
    all_proofs_ok = all_proofs_ok && proofs_ok;
    within_bound = within_bound && max_ratio <= 1.10;
    mean_final += rep.regret;
    max_final = std::max(max_final, rep.regret);
    final_bound = rep.rounds.empty() ? 0.0 : rep.rounds.back().bound;
    entry["max_regret_to_bound_ratio"] = max_ratio;
    per_seed.push_back(entry);
  }

  if (!regret_by_seed.empty()) {
    std::ofstream mean_csv(fs::path(config.out_dir) / "regret_mean.csv", std::ios::binary);
    mean_csv << "t,regret,bound\n";
    const size_t rounds = regret_by_seed[0].size();
    for (size_t i = 0; i < rounds; ++i) {
      double m = 0.0;
      for (const auto& r : regret_by_seed) m += r[i];
      m /= static_cast<double>(regret_by_seed.size());
      mean_csv << (i + 1) << ',' << format_double(m) << ',' << format_double(bound_by_round[i])
               << '\n';
    }
    files.push_back("regret_mean.csv");
  }

  json summary;
  summary["config"] = json::parse(to_json_text(config));
  summary["files"] = files;
  summary["per_seed"] = per_seed;
  if (!config.seeds.empty()) {
    summary["mean_final_regret"] = mean_final / static_cast<double>(config.seeds.size());
    summary["max_final_regret"] = max_final;
    summary["final_bound"] = final_bound;
  }
  summary["regret_within_bound"] = within_bound;
  summary["proof_checks_pass"] = all_proofs_ok;
  summary["aborted"] = any_aborted;
  std::ofstream sj(fs::path(config.out_dir) / "summary.json", std::ios::binary);
  sj << summary.dump(2) << '\n';

  return any_aborted ? kExitRuntime : kExitOk;
}

int run_verify(const ExperimentConfig& config) {
  const Space& space = config.space;
  const std::uint64_t seed = config.seeds.front();
  const std::uint64_t checker = derive_seed(seed, StreamId::Checker);
  json report;
  bool all_ok = true;
  auto add = [&](const std::string& label, const json& entry, bool ok) {
    report[label] = entry;
    all_ok = all_ok && ok;
  };

  // geodesic scaling: d(gamma(s), gamma(t)) = (t - s) d(x, y)
  {
    Rng rng(checker);
    double worst = 0.0;
    const int n_pairs = 500;
    for (int i = 0; i < n_pairs; ++i) {
      const Point x = sample_one(space, rng);
      const Point y = sample_one(space, rng);
      const double d = distance(space, x, y);
      double s = rng.uniform(), t = rng.uniform();
      if (s > t) std::swap(s, t);
      const double dst = distance(space, geodesic_point(space, x, y, s), geodesic_point(space, x, y, t));
      worst = std::max(worst, std::abs(dst - (t - s) * d) / (1.0 + d));
    }
    add("geodesic_scaling", json{{"pass", worst <= 1e-8}, {"worst_relative_error", worst}},
        worst <= 1e-8);
  }

  // curvature comparisons
  if (space.kappa == 0.0) {
    CheckReport lo = check_curvature_bound(space, 0.0, CurvatureSide::Lower, 500, checker, 1e-10);
    CheckReport up = check_curvature_bound(space, 0.0, CurvatureSide::Upper, 500, checker, 1e-10);
    add("comparison_identity_flat",
        json{{"lower", check_to_json(lo)}, {"upper", check_to_json(up)},
             {"pass", lo.pass && up.pass}},
        lo.pass && up.pass);
  } else if (space.kappa > 0) {
    CheckReport lo0 = check_curvature_bound(space, 0.0, CurvatureSide::Lower, 500, checker);
    CheckReport lok = check_curvature_bound(space, space.kappa, CurvatureSide::Lower, 500, checker);
    CheckReport upk = check_curvature_bound(space, space.kappa, CurvatureSide::Upper, 500, checker);
    add("curvature_lower_bound",
        json{{"kappa_zero", check_to_json(lo0)}, {"kappa_native", check_to_json(lok)},
             {"model_plane_upper", check_to_json(upk)},
             {"pass", lo0.pass && lok.pass && upk.pass}},
        lo0.pass && lok.pass && upk.pass);
  } else {
    CheckReport up0 = check_curvature_bound(space, 0.0, CurvatureSide::Upper, 500, checker);
    CheckReport upk = check_curvature_bound(space, space.kappa, CurvatureSide::Upper, 500, checker);
    CheckReport lok = check_curvature_bound(space, space.kappa, CurvatureSide::Lower, 500, checker);
    add("curvature_upper_bound",
        json{{"kappa_zero", check_to_json(up0)}, {"kappa_native", check_to_json(upk)},
             {"model_plane_lower", check_to_json(lok)},
             {"pass", up0.pass && upk.pass && lok.pass}},
        up0.pass && upk.pass && lok.pass);
  }

  // convexity and expconcavity of the canonical loss family
  {
    Rng rng(splitmix64(checker));
    const Point center = sample_one(space, rng);
    const LossFn sq = squared_distance_loss(space, center);
    const double alpha = space.kappa <= 0 ? 2.0 : 0.0;
    CheckReport conv = check_alpha_convex(space, sq, alpha, 500, checker);
    add("squared_distance_convexity",
        json{{"alpha", alpha}, {"report", check_to_json(conv)}, {"pass", conv.pass}}, conv.pass);
    if (space.kappa <= 0) {
      const double beta = 1.0 / (2.0 * space.diameter * space.diameter);
      CheckReport expc = check_expconcave(space, sq, beta, 500, checker);
      add("squared_distance_expconcavity",
          json{{"beta", beta}, {"report", check_to_json(expc)}, {"pass", expc.pass}}, expc.pass);
    }
    const LossFn sc = scaled_distance_loss(space, center);
    CheckReport conv0 = check_alpha_convex(space, sc, 0.0, 500, checker);
    add("scaled_distance_convexity", json{{"report", check_to_json(conv0)}, {"pass", conv0.pass}},
        conv0.pass);
  }

  // Jensen's inequality at the barycenter for random convex functions
  if (space.kappa <= 0) {
    Rng rng(splitmix64(checker + 1));
    ParticleMeasure pm = uniform_measure(sample_prior(space, 30, splitmix64(checker + 2)));
    bool ok = true;
    double worst = -1e300;
    for (int rep_i = 0; rep_i < 20; ++rep_i) {
      const int n_centers = 1 + static_cast<int>(rng.uniform() * 3);
      std::vector<Point> centers;
      std::vector<double> coefs;
      for (int k = 0; k < n_centers; ++k) {
        centers.push_back(sample_one(space, rng));
        coefs.push_back(rng.uniform(0.1, 2.0));
      }
      LossFn f;
      f.meta.alpha = 0.0;
      f.eval = [&, centers, coefs](const Point& x) {
        double acc = 0.0;
        for (size_t k = 0; k < centers.size(); ++k) acc += coefs[k] * distance(space, centers[k], x);
        return acc;
      };
      const JensenReport jr = jensen_check(space, pm, f, 0.0);
      ok = ok && jr.conclusive && jr.pass;
      worst = std::max(worst, -jr.slack);
    }
    add("jensen_convex", json{{"pass", ok}, {"worst_violation", worst}}, ok);
  }

  // barycenter minimality probe
  {
    Rng rng(splitmix64(checker + 3));
    ParticleMeasure pm = uniform_measure(sample_prior(space, 50, splitmix64(checker + 4)));
    const BarycenterResult bc = barycenter(space, pm);
    double min_probe = 1e300;
    for (int i = 0; i < 1000; ++i) {
      min_probe = std::min(min_probe, variance_at(space, pm, sample_one(space, rng)));
    }
    const bool ok = bc.converged && bc.variance <= min_probe + 1e-7;
    add("barycenter_minimality",
        json{{"pass", ok}, {"variance", bc.variance}, {"best_probe", min_probe}}, ok);
  }

  // psi monotone decreasing
  {
    bool ok = true;
    double prev = psi(1e-3);
    for (int i = 2; i <= 10000; ++i) {
      const double cur = psi(1e-3 + (30.0 - 1e-3) * i / 10000.0);
      if (cur >= prev) {
        ok = false;
        break;
      }
      prev = cur;
    }
    add("psi_monotone_decreasing", json{{"pass", ok}}, ok);
  }

  // s_kappa monotone increasing on its true domain
  {
    const double kappa = space.kappa;
    const double upper = kappa > 0 ? 0.5 * model_diameter(kappa) : space.diameter;
    bool ok = true;
    double prev = s_kappa(kappa, 0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double cur = s_kappa(kappa, upper * i / 1000.0 * (kappa > 0 ? 0.999 : 1.0));
      if (cur <= prev) {
        ok = false;
        break;
      }
      prev = cur;
    }
    add("s_kappa_monotone", json{{"pass", ok}, {"domain_upper", upper}}, ok);
  }

  // contraction ratios behind the ball-mass bounds
  {
    std::vector<double> grid_r, grid_eps;
    for (int i = 0; i <= 200; ++i) grid_r.push_back(0.0 + 40.0 * i / 200.0);
    for (int i = 1; i <= 200; ++i) grid_eps.push_back(i / 201.0);
    CheckReport cr = contraction_ratio_check(grid_r, grid_eps);
    add("contraction_ratios", check_to_json(cr), cr.pass);
  }

  // ball-mass lower bound
  {
    Rng rng(splitmix64(checker + 5));
    const double r0 = space.diameter / 4.0;
    bool ok = true;
    json pairs = json::array();
    for (int i = 0; i < 10; ++i) {
      const Point x = sample_one(space, rng);
      const double r = rng.uniform(0.2 * r0, r0);
      const BallMassReport bm = ball_mass_check(space, x, r, r0, space.dim_p, space.kappa, 20000,
                                                splitmix64(checker + 100 + i));
      ok = ok && bm.pass;
      pairs.push_back(json{{"r", r}, {"mass", bm.mass_r}, {"threshold", bm.threshold},
                           {"stderr", bm.stderr_}, {"pass", bm.pass}});
    }
    add("ball_mass_lower_bound", json{{"pass", ok}, {"pairs", pairs}}, ok);
  }

  // proof-level inequalities on a short game
  {
    const bool expconcave_regime = space.kappa <= 0;
    const Schedule sched = expconcave_regime
                               ? Schedule::constant(1.0 / (2.0 * space.diameter * space.diameter))
                               : Schedule::adaptive(0.0, 1.0);
    const std::string family = expconcave_regime ? "squared_distance" : "scaled_distance";
    const std::vector<LossFn> losses =
        make_loss_sequence(space, family, 50, derive_seed(seed, StreamId::LossCenters));
    const RegretReport rep = run_game(space, sched, losses, 500, seed);
    const bool ok = !rep.aborted && rep.proofs.telescoping_ok && rep.proofs.gibbs_ok &&
                    rep.proofs.variational_ok && rep.proofs.correction_hoeffding_ok;
    add("game_proof_inequalities",
        json{{"pass", ok},
             {"telescoping_lhs", rep.proofs.telescoping_lhs},
             {"telescoping_rhs", rep.proofs.telescoping_rhs},
             {"gibbs_lhs", rep.proofs.gibbs_lhs},
             {"gibbs_rhs", rep.proofs.gibbs_rhs}},
        ok);
  }

  fs::create_directories(config.out_dir);
  report["pass"] = all_ok;
  report["space"] = json::parse(to_json_text(space));
  std::ofstream out(fs::path(config.out_dir) / "verify_report.json", std::ios::binary);
  out << report.dump(2) << '\n';
  return all_ok ? kExitOk : kExitVerifyFailed;
}

int run_batch(const ExperimentConfig& config) {
  const Space& space = config.space;
  const BatchTask task = quadratic_task(space);
  if (config.schedule.kind != Schedule::Kind::Constant) {
    throw ConfigError("batch mode uses the constant schedule");
  }
  const double beta = config.schedule.beta;
  const long n = config.batch.n;
  const double c_value = default_c_value(space);
  const double bound =
      regret_bound_expconcave(beta, space.dim_p, n + 1, c_value) / static_cast<double>(n + 1);

  double sum = 0.0, sumsq = 0.0;
  bool jensen_ok = true;
  json reps = json::array();
  for (long r = 0; r < config.batch.replications; ++r) {
    const std::uint64_t seed = splitmix64(config.seeds.front() + static_cast<std::uint64_t>(r));
    const BatchResult br = online_to_batch(space, config.schedule, task, n, config.n_atoms, seed);
    const ExcessRiskReport er = excess_risk(space, br.theta_hat, task, config.batch.n_mc, seed, bound);
    jensen_ok = jensen_ok && br.jensen_ok;
    sum += er.estimate;
    sumsq += er.estimate * er.estimate;
    reps.push_back(json{{"estimate", er.estimate}, {"mc_stderr", er.stderr_},
                        {"jensen_worst_gap", br.jensen_worst_gap}});
  }
  const double nn = static_cast<double>(config.batch.replications);
  const double mean = sum / nn;
  const double var = std::max(0.0, sumsq / nn - mean * mean);
  const double se = nn > 1 ? std::sqrt(var / (nn - 1)) : 0.0;
  const bool pass = jensen_ok && mean <= bound + 3.0 * se;

  fs::create_directories(config.out_dir);
  json out{{"n", n},
           {"estimate", mean},
           {"stderr", se},
           {"bound", bound},
           {"pass", pass},
           {"jensen_ok", jensen_ok},
           {"replications", config.batch.replications},
           {"per_replication", reps}};
  std::ofstream f(fs::path(config.out_dir) / "batch.json", std::ios::binary);
  f << out.dump(2) << '\n';
  return pass ? kExitOk : kExitVerifyFailed;
}

int run_config(const ExperimentConfig& config) {
  switch (config.mode) {
    case ConfigMode::Experiment: return run_experiment(config);
    case ConfigMode::Verify: return run_verify(config);
    case ConfigMode::Batch: return run_batch(config);
  }
  return kExitRuntime;
}

}  // namespace ewb
