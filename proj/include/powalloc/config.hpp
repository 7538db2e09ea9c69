// Experiment configuration: JSON schema with strict key checking, defaults
// and semantic validation. See README for the grammar.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powalloc/channel_model.hpp"

namespace powalloc {

enum class Algorithm { kCe, kCce, kPareto, kNb };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct AlgorithmParams {
  std::optional<double> mu;            // default 2*(L-1), resolved per user at run time
  double mw_epsilon = 0.1;
  std::uint64_t window = 1000;
  double delta = 0.5;
  double explore_eps = 0.1;
  int max_experiments = 50;
  std::uint64_t t_disagreement = 5000;
  std::uint64_t round_cap = 10000;
  std::optional<std::vector<double>> alphas;  // default: the per-user rates
  std::uint64_t checkpoint_every = 1000;
  std::uint64_t snapshot_every = 100;
  std::uint64_t renorm_every = 1000;
  bool visit_normalized_utility = false;
  bool paired_reestimate = false;
  bool strict_experiment_budget = false;
  bool track_actual_regret = false;
  double verify_epsilon = 0.05;
};

struct ExperimentConfig {
  std::string name;
  FadingModel model;
  std::vector<double> power_levels;
  std::vector<double> rates;          // one per user (fixed-rate mode)
  std::vector<double> rate_set;       // nonempty -> multi-rate mode
  std::vector<double> snr_db;
  std::vector<Algorithm> algorithms;
  std::uint64_t iterations = 100000;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  bool verify = false;
  AlgorithmParams params;

  bool multirate() const { return !rate_set.empty(); }
};

// Parses and validates a config file. Unknown keys are rejected; parse
// errors carry line/column, semantic errors name the offending field. Throws
// ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Average-power budget implied by an SNR point under unit noise.
double snr_db_to_budget(double snr_db);

}  // namespace powalloc
