// Experiment orchestration: SNR sweeps over seed batches, CSV emission,
// static plots and the fairness table.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "powalloc/config.hpp"
#include "powalloc/cooperative_search.hpp"
#include "powalloc/multiplicative_weights.hpp"
#include "powalloc/oracle.hpp"
#include "powalloc/regret_matching.hpp"

namespace powalloc {

struct ResultRow {
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::string algorithm;
  int user = 0;
  double rate = 0.0;      // throughput of this user, bits per channel use
  double sum_rate = 0.0;  // identical across the rows of one run
  std::uint64_t iterations = 0;
  std::string convergence;
  double wall_time_ms = 0.0;
};

struct SweepOptions {
  // Wall-clock timing breaks byte-reproducibility of the CSV; off by default.
  bool timing = false;
  // Write per-run trace CSVs (regret / external regret / score) to trace_dir.
  bool write_traces = false;
  std::string trace_dir;
};

struct SweepOutput {
  std::vector<ResultRow> rows;
  std::vector<VerificationRow> verification;
};

// Enumerates each user's feasible set at the given budget.
std::vector<PolicySet> build_policy_sets(const ExperimentConfig& cfg, double budget);

// Per-user search/score weights: explicit alphas, else the per-user rates.
std::vector<double> resolve_alphas(const ExperimentConfig& cfg);

// Master seed of one run; depends only on (seed, algorithm, snr) so sweeping
// a superset of SNRs extends rather than alters previous rows.
std::uint64_t run_master_seed(std::uint64_t seed, Algorithm algorithm, double snr_db);

SweepOutput sweep(const ExperimentConfig& cfg, const SweepOptions& options = {});

std::string results_csv(std::span<const ResultRow> rows);

// Writes results.csv, sum_rates.svg, fairness.csv (when both pareto and nb
// rows exist; otherwise a notice on `log`) and verification_report.csv (when
// verification rows exist) into out_dir.
void emit_outputs(const SweepOutput& output, const std::string& out_dir, std::ostream& log);

}  // namespace powalloc
