// Multiplicative-weights dynamics with the history-based empirical utility
// estimator; the time-averaged product of per-user strategies is the
// candidate coarse correlated equilibrium.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "powalloc/oracle.hpp"
#include "powalloc/sim_core.hpp"

namespace powalloc {

// Weight state of one user. Costs are c = -u with u in [0,1], so weights are
// nondecreasing; callers renormalize periodically (scaling never changes the
// strategy).
class MwLearner {
 public:
  // epsilon must lie in (0,1); visit_normalized switches the estimator to
  // divide by the action's visit count instead of total slots.
  MwLearner(int n_actions, double epsilon, bool visit_normalized = false);

  int n_actions() const { return n_actions_; }
  std::uint64_t horizon() const { return t_; }
  std::span<const double> weights() const { return weights_; }

  // (1/t) sum over slots of w * 1{played == k}; 0 before the first slot.
  double empirical_utility(int k) const;

  // Records the slot and applies the weight update with c(k) = -u_t(k) for
  // every action.
  void observe(int played, bool ack);

  std::vector<double> strategy() const;
  int sample(RngStream& rng) const;

  // Divides all weights by their maximum.
  void renormalize();

 private:
  int n_actions_;
  double eps_;
  double log1me_;  // log(1 - eps), cached for the exp form of the update
  bool visit_normalized_;
  std::vector<double> weights_;
  std::vector<double> cum_reward_;
  std::vector<std::uint64_t> visits_;
  std::uint64_t t_ = 0;
};

// Elementwise update mu_{t+1}(k) = mu_t(k) * (1-eps)^{c(k)}.
void mw_update(std::span<double> weights, std::span<const double> costs, double epsilon);

// Normalized weight vector.
std::vector<double> mw_strategy(std::span<const double> weights);

// Harness-side external regret: realized average reward versus the best
// fixed action in hindsight, counterfactuals computed from the true slot
// interference.
class ExternalRegretTracker {
 public:
  explicit ExternalRegretTracker(const PolicySet& set);

  void observe(int state, double interference, bool own_ack);
  double regret() const;  // clamped at 0

 private:
  const PolicySet* set_;
  std::vector<double> counterfactual_;
  double realized_ = 0.0;
  std::uint64_t t_ = 0;
};

struct CceOptions {
  std::uint64_t iterations = 0;
  double epsilon = 0.1;
  std::uint64_t snapshot_every = 100;
  std::uint64_t renorm_every = 1000;
  std::uint64_t checkpoint_every = 1000;
  bool visit_normalized_utility = false;
  bool track_external_regret = true;
};

struct ExternalRegretCheckpoint {
  std::uint64_t slot = 0;
  std::vector<double> external_regret;
};

struct CceResult {
  AveragedProductDistribution phi;
  RunTrace trace;
  std::vector<ExternalRegretCheckpoint> checkpoints;
  std::vector<double> final_external_regret;
  WindowStats tail;  // last 10% of slots
};

CceResult run_cce_learning(const FadingModel& model, std::span<const PolicySet> sets,
                           const CceOptions& options, RngPool& rngs);

void write_external_regret_trace(std::ostream& os,
                                 std::span<const ExternalRegretCheckpoint> checkpoints);

}  // namespace powalloc
