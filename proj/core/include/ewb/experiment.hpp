#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewb/batch.hpp"
#include "ewb/forecaster.hpp"

namespace ewb {

enum class ConfigMode { Experiment, Verify, Batch };

struct BatchConfig {
  long replications = 20;
  long n = 500;
  long n_mc = 100000;
};

/// One experiment: a space, a schedule, a named loss family, horizon,
/// atom count and the seeds to fan out over.
struct ExperimentConfig {
  ConfigMode mode = ConfigMode::Experiment;
  Space space = Space::euclidean_ball(2, 1.0);
  Schedule schedule = Schedule::constant(0.125);
  std::string loss_family = "squared_distance";  // or "scaled_distance"
  long rounds = 100;
  int n_atoms = 10000;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "out";
  BatchConfig batch;
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string to_json_text(const ExperimentConfig& config);

/// Reads and validates a config file; parse errors carry file:line anchors.
ExperimentConfig load_config(const std::string& path);

/// Per-round losses of the configured family with centers drawn from the
/// prior on a dedicated stream.
std::vector<LossFn> make_loss_sequence(const Space& space, const std::string& family, long rounds,
                                       std::uint64_t seed);

/// Exit codes shared with the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitVerifyFailed = 3;

/// Runs one game per seed; writes regret_seed<S>.csv per seed, a summary
/// JSON and a plot-ready mean-regret CSV. Deterministic per seed.
int run_experiment(const ExperimentConfig& config);

/// Full checker battery for the configured space; writes
/// verify_report.json keyed by check label and returns kExitVerifyFailed
/// when any check fails.
int run_verify(const ExperimentConfig& config);

/// Online-to-batch replications on the synthetic quadratic task; writes
/// batch.json with {n, estimate, stderr, bound, pass}.
int run_batch(const ExperimentConfig& config);

/// Dispatch by config.mode.
int run_config(const ExperimentConfig& config);

}  // namespace ewb
