// Exact expected utilities by enumeration over joint channel states,
// epsilon-CE/CCE membership checks and brute-force Pareto / Nash-bargaining
// optima on small instances. Everything here is deterministic.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "powalloc/sim_core.hpp"

namespace powalloc {

// Joint distribution over action profiles, profile -> probability.
struct SparseDistribution {
  std::map<std::vector<int>, double> prob;
};

// Time-average of product distributions, kept as equally weighted per-user
// strategy snapshots plus the exact running mean of each user's strategy.
struct AveragedProductDistribution {
  // snapshots[c][user][action]
  std::vector<std::vector<std::vector<double>>> snapshots;
  std::vector<std::vector<double>> mean_strategy;
};

SparseDistribution empirical_distribution(const RunTrace& trace);
void validate_distribution(const SparseDistribution& d);

// Enumeration guards; "small instance" is a crisp contract.
inline constexpr std::uint64_t kUtilityEvalGuard = 10'000'000;   // joint states per user
inline constexpr std::uint64_t kProfileEnumGuard = 1'000'000;    // joint profiles

// Exact per-user success probabilities of a fixed profile (expectation over
// all direct states and the cross states into each receiver). Memoizes by
// (user, profile); the cache is bounded by kCacheCapacity entries.
class ExactUtilityOracle {
 public:
  ExactUtilityOracle(const FadingModel& model, std::span<const PolicySet> sets,
                     std::uint64_t eval_guard = kUtilityEvalGuard);

  double utility(int user, const ActionProfile& profile);
  std::vector<double> utilities(const ActionProfile& profile);

  static constexpr std::size_t kCacheCapacity = 1u << 20;

 private:
  double compute(int user, const ActionProfile& profile) const;

  const FadingModel* model_;
  std::span<const PolicySet> sets_;
  std::map<std::pair<int, std::vector<int>>, double> cache_;
};

std::vector<double> exact_utility(const FadingModel& model, std::span<const PolicySet> sets,
                                  const ActionProfile& profile);

struct EquilibriumCheck {
  bool pass = false;
  double epsilon = 0.0;
  double max_violation = 0.0;
  int witness_user = -1;
  int witness_action = -1;     // the recommended / played action (CE only)
  int witness_deviation = -1;  // the profitable replacement
};

// Correlated-equilibrium condition: for every (user, action, replacement),
// sum over the support of phi conditioned on the action of the utility gain
// from swapping. Passes iff the max gain <= eps.
EquilibriumCheck is_epsilon_ce(const SparseDistribution& phi, const FadingModel& model,
                               std::span<const PolicySet> sets, double eps);

// Coarse condition: unconditional fixed deviations only.
EquilibriumCheck is_epsilon_cce(const SparseDistribution& phi, const FadingModel& model,
                                std::span<const PolicySet> sets, double eps);
EquilibriumCheck is_epsilon_cce(const AveragedProductDistribution& phi, const FadingModel& model,
                                std::span<const PolicySet> sets, double eps);

// Exhaustive argmax of sum_i weight_i(k) * u_i(k); weight is alphas[i] or,
// when rate_weighted, the rate of user i's action. Ties keep the lowest
// lexicographic profile.
struct ParetoOptimum {
  ActionProfile profile;
  double score = 0.0;
  std::vector<double> utilities;
};
ParetoOptimum brute_force_pareto(const FadingModel& model, std::span<const PolicySet> sets,
                                 std::span<const double> alphas, bool rate_weighted = false);

// Exhaustive argmax of prod_i max(u_i - d_i, 0); if no profile has positive
// product, returns the disagreement profile with score 0.
struct NashOptimum {
  ActionProfile profile;
  double product = 0.0;
  std::vector<double> utilities;
};
NashOptimum brute_force_nb(const FadingModel& model, std::span<const PolicySet> sets,
                           std::span<const double> disagreement,
                           const ActionProfile& disagreement_profile);

// One row of a verification report:
// check,epsilon,max_violation,witness_user,witness_action,witness_deviation,pass
struct VerificationRow {
  std::string check;
  double epsilon = 0.0;
  double max_violation = 0.0;
  int witness_user = -1;
  int witness_action = -1;
  int witness_deviation = -1;
  bool pass = false;
};

VerificationRow to_row(const std::string& check, const EquilibriumCheck& c);
void write_verification_report(std::ostream& os, std::span<const VerificationRow> rows);

}  // namespace powalloc
