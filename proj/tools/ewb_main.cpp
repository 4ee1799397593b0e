// Command line driver: experiment runner, verification battery,
// online-to-batch conversion and regret-bound evaluation.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ewb/analysis.hpp"
#include "ewb/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int atoms = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides the config)");
  cmd->add_option("--seed", opts.seed, "replace the config seed list with this seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--atoms", opts.atoms, "override the number of atoms");
}

ewb::ExperimentConfig resolve(const CommonOpts& opts, ewb::ConfigMode mode) {
  ewb::ExperimentConfig config = ewb::load_config(opts.config_path);
  config.mode = mode;
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (opts.seed_set) config.seeds = {opts.seed};
  if (opts.atoms > 0) config.n_atoms = opts.atoms;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponentially weighted barycentric forecasting on geodesic metric spaces"};
  app.require_subcommand(1);

  CommonOpts run_opts, verify_opts, batch_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "play regret games and write CSV reports");
  add_common(run_cmd, run_opts);
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the geometry/analysis checker battery");
  add_common(verify_cmd, verify_opts);
  CLI::App* batch_cmd =
      app.add_subcommand("batch", "online-to-batch conversion on the synthetic task");
  add_common(batch_cmd, batch_opts);

  int theorem = 1;
  double beta = 1.0, p = 2.0, c_value = 1.0, range_a = 0.0, range_b = 1.0;
  long n = 2;
  CLI::App* bound_cmd = app.add_subcommand("bound", "evaluate a regret bound");
  bound_cmd->add_option("--theorem", theorem, "1 = expconcave losses, 2 = convex bounded losses")
      ->check(CLI::IsMember({1, 2}));
  bound_cmd->add_option("--beta", beta, "learning rate (theorem 1)");
  bound_cmd->add_option("--p", p, "dimension parameter")->required();
  bound_cmd->add_option("--n", n, "horizon")->required();
  bound_cmd->add_option("--c", c_value, "prior constant in (0, 1]");
  bound_cmd->add_option("--a", range_a, "loss range lower end (theorem 2)");
  bound_cmd->add_option("--b", range_b, "loss range upper end (theorem 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ewb::kExitOk : ewb::kExitConfig;
  }

  try {
    if (run_cmd->parsed()) {
      return ewb::run_experiment(resolve(run_opts, ewb::ConfigMode::Experiment));
    }
    if (verify_cmd->parsed()) {
      return ewb::run_verify(resolve(verify_opts, ewb::ConfigMode::Verify));
    }
    if (batch_cmd->parsed()) {
      return ewb::run_batch(resolve(batch_opts, ewb::ConfigMode::Batch));
    }
    if (bound_cmd->parsed()) {
      const double value = theorem == 1
                               ? ewb::regret_bound_expconcave(beta, p, n, c_value)
                               : ewb::regret_bound_convex_bounded(range_a, range_b, p, n, c_value);
      std::printf("%.6g\n", value);
      return ewb::kExitOk;
    }
  } catch (const ewb::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ewb::kExitConfig;
  } catch (const ewb::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ewb::kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ewb::kExitRuntime;
  }
  return ewb::kExitConfig;
}
