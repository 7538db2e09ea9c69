// Distributed stochastic local search over action profiles driven by
// overheard ACK/NACKs: weighted-sum objective for Pareto points, Nash
// product over a disagreement point for bargaining solutions.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "powalloc/sim_core.hpp"

namespace powalloc {

enum class SearchMode { kWeightedSum, kNashProduct };

struct SearchConfig {
  std::vector<double> alphas;        // per-user weights, weighted-sum mode
  std::uint64_t window = 1000;       // slots per score evaluation
  double delta = 0.5;                // experiment probability per turn
  double explore_eps = 0.1;          // probability of a uniform proposal
  int max_experiments = 50;          // consecutive failures before a user stops
  SearchMode mode = SearchMode::kWeightedSum;
  std::uint64_t t_disagreement = 5000;
  std::uint64_t round_cap = 10000;
  bool paired_reestimate = false;    // compare against a fresh benchmark window
  bool strict_experiment_budget = false;  // MAX counts total failures, never resets
  bool rate_weighted = false;        // weight each user by its action's rate
};

struct Benchmark {
  ActionProfile profile;
  double score = 0.0;
  std::vector<double> utilities;     // ACK frequencies at the benchmark window
  std::vector<double> disagreement;  // d, Nash mode only
};

struct SearchRound {
  std::uint64_t round = 0;
  int active_user = -1;
  double trial_score = 0.0;
  double benchmark_score = 0.0;
  bool accepted = false;
  std::uint64_t slots_total = 0;
};

struct SearchResult {
  Benchmark benchmark;
  std::vector<SearchRound> trace;    // one row per experiment
  std::uint64_t total_slots = 0;
  std::uint64_t slots_to_final = 0;  // slots burned up to the last accepted update
  std::uint64_t rounds = 0;
  bool degenerate = false;           // Nash mode: no positive product found
};

// Window score. Weighted-sum mode: sum_i alpha_i * (ACK_i / T) (or the
// action's rate instead of alpha_i when rate_weighted). Nash mode:
// prod_i max(u_i - d_i, 0).
double weighted_score(const WindowStats& window, const ActionProfile& profile,
                      std::span<const PolicySet> sets, const SearchConfig& config,
                      std::span<const double> disagreement = {});

// Local proposal: with probability explore_eps a uniform draw over the other
// actions; otherwise walk the states in order of descending probability
// (ties by descending gain) and draw uniformly from the first nonempty set of
// actions with strictly higher power at that state. Falls back to uniform
// when the current action is maximal everywhere. Never returns `current`.
int propose_local(int current, const PolicySet& set, const GainAlphabet& direct,
                  double explore_eps, RngStream& rng);

// Greedy disagreement profile (max power to the likeliest state, then the
// next, ...) played for t_d slots; d_i is user i's ACK frequency.
std::pair<std::vector<double>, ActionProfile> disagreement_point(
    const FadingModel& model, std::span<const PolicySet> sets, std::uint64_t t_d,
    RngStream& env);

// The greedy per-user policy choice used by disagreement_point.
int greedy_disagreement_action(const PolicySet& set, const GainAlphabet& direct);

SearchResult run_pareto_search(const FadingModel& model, std::span<const PolicySet> sets,
                               const SearchConfig& config, RngPool& rngs);

// Nash mode; computes the disagreement point first unless one is supplied.
SearchResult run_nash_bargaining(
    const FadingModel& model, std::span<const PolicySet> sets, const SearchConfig& config,
    RngPool& rngs,
    std::optional<std::pair<std::vector<double>, ActionProfile>> forced_disagreement =
        std::nullopt);

void write_score_trace(std::ostream& os, std::span<const SearchRound> trace);

}  // namespace powalloc
