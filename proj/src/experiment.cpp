#include "powalloc/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "powalloc/errors.hpp"
#include "powalloc/svg_plot.hpp"

namespace powalloc {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string series_color(const std::string& algorithm) {
  if (algorithm == "ce") return "#1f77b4";
  if (algorithm == "cce") return "#ff7f0e";
  if (algorithm == "pareto") return "#2ca02c";
  if (algorithm == "nb") return "#d62728";
  return "#7f7f7f";
}

struct RunSummary {
  std::vector<double> user_rates;
  std::uint64_t iterations = 0;
  std::string convergence;
};

std::string trace_path(const SweepOptions& options, const std::string& algorithm, double snr,
                       std::uint64_t seed) {
  return options.trace_dir + "/trace_" + algorithm + "_snr" + fmt("%g", snr) + "_seed" +
         std::to_string(seed) + ".csv";
}

}  // namespace

std::vector<PolicySet> build_policy_sets(const ExperimentConfig& cfg, double budget) {
  std::vector<PolicySet> sets;
  sets.reserve(static_cast<std::size_t>(cfg.model.n_users));
  for (int i = 0; i < cfg.model.n_users; ++i) {
    const GainAlphabet& direct = cfg.model.direct[static_cast<std::size_t>(i)];
    if (cfg.multirate()) {
      sets.push_back(enumerate_multirate(direct, cfg.power_levels, budget, cfg.rate_set, i));
    } else {
      sets.push_back(enumerate_policies(direct, cfg.power_levels, budget,
                                        cfg.rates[static_cast<std::size_t>(i)], i));
    }
  }
  return sets;
}

std::vector<double> resolve_alphas(const ExperimentConfig& cfg) {
  if (cfg.params.alphas) return *cfg.params.alphas;
  return cfg.rates;  // empty in multi-rate mode; scoring is rate-weighted there
}

std::uint64_t run_master_seed(std::uint64_t seed, Algorithm algorithm, double snr_db) {
  return mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(algorithm) + 101) ^
               std::bit_cast<std::uint64_t>(snr_db));
}

namespace {

SearchConfig make_search_config(const ExperimentConfig& cfg, SearchMode mode) {
  SearchConfig sc;
  sc.alphas = resolve_alphas(cfg);
  sc.window = cfg.params.window;
  sc.delta = cfg.params.delta;
  sc.explore_eps = cfg.params.explore_eps;
  sc.max_experiments = cfg.params.max_experiments;
  sc.mode = mode;
  sc.t_disagreement = cfg.params.t_disagreement;
  sc.round_cap = cfg.params.round_cap;
  sc.paired_reestimate = cfg.params.paired_reestimate;
  sc.strict_experiment_budget = cfg.params.strict_experiment_budget;
  sc.rate_weighted = cfg.multirate() && !cfg.params.alphas.has_value();
  return sc;
}

std::vector<double> rates_from_window(const WindowStats& w) {
  std::vector<double> rates(w.ack_count.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    rates[i] = w.rate_weighted_ack[i] / static_cast<double>(w.slots);
  }
  return rates;
}

RunSummary run_one(const ExperimentConfig& cfg, Algorithm algorithm,
                   std::span<const PolicySet> sets, RngPool& rngs,
                   const SweepOptions& options, double snr, std::uint64_t seed,
                   std::vector<VerificationRow>* verification) {
  RunSummary summary;
  const std::string name = algorithm_name(algorithm);
  switch (algorithm) {
    case Algorithm::kCe: {
      CeOptions opt;
      opt.iterations = cfg.iterations;
      opt.checkpoint_every = cfg.params.checkpoint_every;
      opt.track_actual_regret = cfg.params.track_actual_regret;
      if (cfg.params.mu) {
        opt.mu.assign(static_cast<std::size_t>(cfg.model.n_users), *cfg.params.mu);
      }
      CeResult r = run_ce_learning(cfg.model, sets, opt, rngs);
      summary.user_rates = rates_from_window(r.tail);
      summary.iterations = cfg.iterations;
      double worst = 0.0;
      for (double v : r.final_max_regret) worst = std::max(worst, v);
      summary.convergence = "max_regret=" + fmt("%.6f", worst);
      if (options.write_traces) {
        std::ofstream os(trace_path(options, name, snr, seed));
        write_regret_trace(os, r.checkpoints);
      }
      if (verification && cfg.verify) {
        EquilibriumCheck c = is_epsilon_ce(r.empirical, cfg.model, sets, cfg.params.verify_epsilon);
        VerificationRow row = to_row("ce_snr" + fmt("%g", snr) + "_seed" + std::to_string(seed), c);
        verification->push_back(row);
      }
      break;
    }
    case Algorithm::kCce: {
      CceOptions opt;
      opt.iterations = cfg.iterations;
      opt.epsilon = cfg.params.mw_epsilon;
      opt.snapshot_every = cfg.params.snapshot_every;
      opt.renorm_every = cfg.params.renorm_every;
      opt.checkpoint_every = cfg.params.checkpoint_every;
      opt.visit_normalized_utility = cfg.params.visit_normalized_utility;
      CceResult r = run_cce_learning(cfg.model, sets, opt, rngs);
      summary.user_rates = rates_from_window(r.tail);
      summary.iterations = cfg.iterations;
      double worst = 0.0;
      for (double v : r.final_external_regret) worst = std::max(worst, v);
      summary.convergence = "external_regret=" + fmt("%.6f", worst);
      if (options.write_traces) {
        std::ofstream os(trace_path(options, name, snr, seed));
        write_external_regret_trace(os, r.checkpoints);
      }
      if (verification && cfg.verify) {
        EquilibriumCheck c = is_epsilon_cce(r.phi, cfg.model, sets, cfg.params.verify_epsilon);
        verification->push_back(
            to_row("cce_snr" + fmt("%g", snr) + "_seed" + std::to_string(seed), c));
      }
      break;
    }
    case Algorithm::kPareto:
    case Algorithm::kNb: {
      const SearchMode mode = algorithm == Algorithm::kPareto ? SearchMode::kWeightedSum
                                                              : SearchMode::kNashProduct;
      SearchConfig sc = make_search_config(cfg, mode);
      SearchResult r = mode == SearchMode::kWeightedSum
                           ? run_pareto_search(cfg.model, sets, sc, rngs)
                           : run_nash_bargaining(cfg.model, sets, sc, rngs);
      // Post-search evaluation window at the final profile; mirrors the
      // "last 10% of slots" measurement of the learning algorithms.
      const std::uint64_t eval_slots = std::max<std::uint64_t>(sc.window, cfg.iterations / 10);
      SlotEngine engine(cfg.model, sets);
      std::uint64_t slot = 0;
      const WindowStats w = play_window(engine, r.benchmark.profile, eval_slots, rngs.env(), slot);
      summary.user_rates = rates_from_window(w);
      summary.iterations = r.total_slots;
      summary.convergence = "final_score=" + fmt("%.6f", r.benchmark.score) +
                            ";slots=" + std::to_string(r.slots_to_final) +
                            ";windows=" + std::to_string(r.rounds);
      if (options.write_traces) {
        std::ofstream os(trace_path(options, name, snr, seed));
        write_score_trace(os, r.trace);
      }
      break;
    }
  }
  return summary;
}

}  // namespace

SweepOutput sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  SweepOutput output;
  if (options.write_traces && !options.trace_dir.empty()) {
    std::filesystem::create_directories(options.trace_dir);
  }
  for (Algorithm algorithm : cfg.algorithms) {
    for (double snr : cfg.snr_db) {
      const double budget = snr_db_to_budget(snr);
      const std::vector<PolicySet> sets = build_policy_sets(cfg, budget);
      for (std::uint64_t seed : cfg.seeds) {
        RngPool rngs(run_master_seed(seed, algorithm, snr), cfg.model.n_users);
        const auto start = std::chrono::steady_clock::now();
        RunSummary summary = run_one(cfg, algorithm, sets, rngs, options, snr, seed,
                                     &output.verification);
        double wall_ms = 0.0;
        if (options.timing) {
          wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        }
        double sum_rate = 0.0;
        for (double r : summary.user_rates) sum_rate += r;
        for (int u = 0; u < cfg.model.n_users; ++u) {
          ResultRow row;
          row.snr_db = snr;
          row.seed = seed;
          row.algorithm = algorithm_name(algorithm);
          row.user = u;
          row.rate = summary.user_rates[static_cast<std::size_t>(u)];
          row.sum_rate = sum_rate;
          row.iterations = summary.iterations;
          row.convergence = summary.convergence;
          row.wall_time_ms = wall_ms;
          output.rows.push_back(std::move(row));
        }
      }
    }
  }
  return output;
}

std::string results_csv(std::span<const ResultRow> rows) {
  std::ostringstream os;
  os << "snr_db,seed,algorithm,user,rate,sum_rate,iterations,convergence,wall_time_ms\n";
  for (const ResultRow& r : rows) {
    os << fmt("%g", r.snr_db) << ',' << r.seed << ',' << r.algorithm << ',' << r.user << ','
       << fmt("%.6f", r.rate) << ',' << fmt("%.6f", r.sum_rate) << ',' << r.iterations << ','
       << r.convergence << ',' << fmt("%g", r.wall_time_ms) << '\n';
  }
  return os.str();
}

namespace {

// mean sum_rate per (algorithm, snr) over seeds, user-0 rows only
std::map<std::string, std::map<double, double>> mean_sum_rates(std::span<const ResultRow> rows) {
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const ResultRow& r : rows) {
    if (r.user != 0) continue;
    auto& cell = acc[r.algorithm][r.snr_db];
    cell.first += r.sum_rate;
    cell.second += 1;
  }
  std::map<std::string, std::map<double, double>> out;
  for (const auto& [alg, by_snr] : acc) {
    for (const auto& [snr, cell] : by_snr) {
      out[alg][snr] = cell.first / cell.second;
    }
  }
  return out;
}

// mean per-user rate for one algorithm at each snr
std::map<double, std::vector<double>> mean_user_rates(std::span<const ResultRow> rows,
                                                      const std::string& algorithm) {
  std::map<double, std::map<int, std::pair<double, int>>> acc;
  for (const ResultRow& r : rows) {
    if (r.algorithm != algorithm) continue;
    auto& cell = acc[r.snr_db][r.user];
    cell.first += r.rate;
    cell.second += 1;
  }
  std::map<double, std::vector<double>> out;
  for (const auto& [snr, by_user] : acc) {
    std::vector<double>& v = out[snr];
    v.resize(by_user.size());
    for (const auto& [user, cell] : by_user) {
      v[static_cast<std::size_t>(user)] = cell.first / cell.second;
    }
  }
  return out;
}

std::string triplet(const std::vector<double>& rates) {
  std::string s = "(";
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i) s += ", ";
    s += fmt("%.2f", rates[i]);
  }
  s += ")";
  return s;
}

}  // namespace

void emit_outputs(const SweepOutput& output, const std::string& out_dir, std::ostream& log) {
  if (output.rows.empty()) throw ValidationError("emit_outputs: no rows");
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir + "/results.csv", std::ios::binary);
    if (!os) throw Error("emit_outputs: cannot write " + out_dir + "/results.csv");
    os << results_csv(output.rows);
  }
  {
    const auto means = mean_sum_rates(output.rows);
    PlotSpec spec;
    spec.title = "Sum rate vs average transmit SNR";
    spec.x_label = "SNR (dB)";
    spec.y_label = "sum rate (bits/channel use)";
    for (const auto& [alg, by_snr] : means) {
      PlotSeries s;
      s.label = alg;
      s.color = series_color(alg);
      for (const auto& [snr, v] : by_snr) {
        s.x.push_back(snr);
        s.y.push_back(v);
      }
      spec.series.push_back(std::move(s));
    }
    std::ofstream os(out_dir + "/sum_rates.svg", std::ios::binary);
    write_svg_plot(os, spec);
  }
  {
    const auto pareto = mean_user_rates(output.rows, "pareto");
    const auto nb = mean_user_rates(output.rows, "nb");
    if (!pareto.empty() && !nb.empty()) {
      std::ofstream os(out_dir + "/fairness.csv", std::ios::binary);
      os << "snr_db,pareto_rates,nb_rates\n";
      for (const auto& [snr, prates] : pareto) {
        auto it = nb.find(snr);
        if (it == nb.end()) continue;
        os << fmt("%g", snr) << ",\"" << triplet(prates) << "\",\"" << triplet(it->second)
           << "\"\n";
      }
    } else {
      log << "fairness table skipped: needs both pareto and nb rows\n";
    }
  }
  if (!output.verification.empty()) {
    std::ofstream os(out_dir + "/verification_report.csv", std::ios::binary);
    write_verification_report(os, output.verification);
  }
}

}  // namespace powalloc
