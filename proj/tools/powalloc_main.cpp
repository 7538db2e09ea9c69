// Command line front end: run a single algorithm, sweep SNR points and
// seeds, verify learned distributions against the exact oracles, or rebuild
// reports from an existing results CSV.
//
// Exit codes: 0 success, 2 config error, 3 runtime error, 4 verification
// failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "powalloc/errors.hpp"
#include "powalloc/experiment.hpp"

namespace {

using namespace powalloc;

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> algorithm;
  std::vector<double> snr_db;
  std::vector<std::uint64_t> seeds;
  std::optional<std::uint64_t> iterations;
  std::optional<std::string> out_dir;
  bool debug_trace = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file (JSON)")->required();
  cmd->add_option("--algorithm", flags.algorithm, "override: ce|cce|pareto|nb");
  cmd->add_option("--snr-db", flags.snr_db, "override SNR list")->delimiter(',');
  cmd->add_option("--seed", flags.seeds, "override seed list")->delimiter(',');
  cmd->add_option("--iterations", flags.iterations, "override iteration count");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_flag("--debug-trace", flags.debug_trace, "write per-run trace CSVs");
  cmd->add_flag("--timing", flags.timing,
                "record wall times (breaks byte-reproducibility of the CSV)");
}

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.algorithm) cfg.algorithms = {algorithm_from_name(*flags.algorithm)};
  if (!flags.snr_db.empty()) cfg.snr_db = flags.snr_db;
  if (!flags.seeds.empty()) cfg.seeds = flags.seeds;
  if (flags.iterations) cfg.iterations = *flags.iterations;
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  return cfg;
}

int do_sweep(const CommonFlags& flags, bool single_algorithm) {
  ExperimentConfig cfg = load_with_overrides(flags);
  if (single_algorithm && cfg.algorithms.size() > 1) {
    cfg.algorithms.resize(1);
    std::cerr << "run: using first algorithm '" << algorithm_name(cfg.algorithms[0])
              << "' (pass --algorithm to pick another)\n";
  }
  SweepOptions options;
  options.timing = flags.timing;
  options.write_traces = flags.debug_trace || single_algorithm;
  options.trace_dir = cfg.out_dir + "/traces";
  SweepOutput output = sweep(cfg, options);
  emit_outputs(output, cfg.out_dir, std::cerr);
  std::cout << "wrote " << output.rows.size() << " rows to " << cfg.out_dir << "/results.csv\n";
  for (const VerificationRow& row : output.verification) {
    if (!row.pass) {
      std::cerr << "verification failed: " << row.check << " (max violation "
                << row.max_violation << ")\n";
      return 4;
    }
  }
  return 0;
}

int do_verify(const CommonFlags& flags) {
  ExperimentConfig cfg = load_with_overrides(flags);
  cfg.verify = true;
  std::vector<VerificationRow> rows;
  const double eps = cfg.params.verify_epsilon;
  for (double snr : cfg.snr_db) {
    const double budget = snr_db_to_budget(snr);
    const std::vector<PolicySet> sets = build_policy_sets(cfg, budget);
    for (std::uint64_t seed : cfg.seeds) {
      for (Algorithm algorithm : cfg.algorithms) {
        RngPool rngs(run_master_seed(seed, algorithm, snr), cfg.model.n_users);
        const std::string tag = "_snr" + std::to_string(snr) + "_seed" + std::to_string(seed);
        if (algorithm == Algorithm::kCe) {
          CeOptions opt;
          opt.iterations = cfg.iterations;
          opt.checkpoint_every = cfg.params.checkpoint_every;
          CeResult r = run_ce_learning(cfg.model, sets, opt, rngs);
          rows.push_back(to_row("ce" + tag, is_epsilon_ce(r.empirical, cfg.model, sets, eps)));
        } else if (algorithm == Algorithm::kCce) {
          CceOptions opt;
          opt.iterations = cfg.iterations;
          opt.epsilon = cfg.params.mw_epsilon;
          opt.snapshot_every = cfg.params.snapshot_every;
          CceResult r = run_cce_learning(cfg.model, sets, opt, rngs);
          rows.push_back(to_row("cce" + tag, is_epsilon_cce(r.phi, cfg.model, sets, eps)));
        } else {
          std::cerr << "verify: skipping algorithm '" << algorithm_name(algorithm)
                    << "' (only ce/cce distributions have equilibrium checks)\n";
        }
      }
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream os(cfg.out_dir + "/verification_report.csv", std::ios::binary);
  write_verification_report(os, rows);
  write_verification_report(std::cout, rows);
  for (const VerificationRow& row : rows) {
    if (!row.pass) return 4;
  }
  return 0;
}

// Rebuilds plot and fairness table from an existing results.csv.
int do_report(const CommonFlags& flags) {
  ExperimentConfig cfg = load_with_overrides(flags);
  const std::string csv_path = cfg.out_dir + "/results.csv";
  std::ifstream in(csv_path);
  if (!in) throw Error("report: cannot open " + csv_path + " (run sweep first)");
  std::string line;
  std::getline(in, line);  // header
  SweepOutput output;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ResultRow row;
    std::size_t pos = 0;
    auto next = [&]() {
      const std::size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma - pos);
      pos = comma == std::string::npos ? line.size() : comma + 1;
      return field;
    };
    row.snr_db = std::stod(next());
    row.seed = std::stoull(next());
    row.algorithm = next();
    row.user = std::stoi(next());
    row.rate = std::stod(next());
    row.sum_rate = std::stod(next());
    row.iterations = std::stoull(next());
    row.convergence = next();
    row.wall_time_ms = std::stod(next());
    output.rows.push_back(std::move(row));
  }
  emit_outputs(output, cfg.out_dir, std::cerr);
  std::cout << "report rebuilt from " << output.rows.size() << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed learning for power allocation on fading interference channels"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, verify_flags, report_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run one algorithm over the configured points");
  add_common(run_cmd, run_flags);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run all configured algorithms and emit reports");
  add_common(sweep_cmd, sweep_flags);
  CLI::App* verify_cmd = app.add_subcommand("verify", "oracle-check learned distributions (small instances)");
  add_common(verify_cmd, verify_flags);
  CLI::App* report_cmd = app.add_subcommand("report", "rebuild plot and tables from results.csv");
  add_common(report_cmd, report_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_sweep(run_flags, /*single_algorithm=*/true);
    if (sweep_cmd->parsed()) return do_sweep(sweep_flags, /*single_algorithm=*/false);
    if (verify_cmd->parsed()) return do_verify(verify_flags);
    if (report_cmd->parsed()) return do_report(report_flags);
  } catch (const powalloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
