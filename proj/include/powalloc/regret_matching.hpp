// Fully distributed regret matching on optimistically estimated rewards.
// A learner sees only its own action, its own direct gain and its own ACK;
// the counterfactual reward of an alternative is estimated from the
// threshold ordering. The actual-regret tracker lives beside it for the
// verification harness only: it reads the true slot interference, which the
// simulator knows but a learner never does.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "powalloc/oracle.hpp"
#include "powalloc/sim_core.hpp"

namespace powalloc {

// Estimated one-slot reward of playing `alt` instead of `played` given only
// the own ACK bit and the direct state (the S_L / S_G / S_E case split).
// Closed form: 1 on ACK; on NACK, 1 iff gamma(alt) > gamma(played).
// For alt == played this is the actual reward.
int estimated_reward(bool own_ack, int played, int alt, int state, const PolicySet& set);

// Per-user running sums of estimated instantaneous regrets over ordered
// action pairs, and the strategy rule derived from them.
class RegretLearner {
 public:
  // mu must be at least L-1 so the stay-probability cannot go negative.
  RegretLearner(const PolicySet& set, double mu);

  void reset(int initial_action);
  void set_action(int k) { current_ = k; }
  int current_action() const { return current_; }
  std::uint64_t horizon() const { return t_; }
  double mu() const { return mu_; }

  // Folds one slot into the regret sums. Only the played row moves; on ACK
  // every estimated difference is zero.
  void observe(bool own_ack, int state);

  // Regret matrix entry: max(0, sums / T).
  double regret(int k, int khat) const;
  double max_regret() const;

  // Strategy for the next slot: switch to khat with probability
  // regret(current, khat) / mu, stay otherwise.
  std::vector<double> next_strategy() const;

  // Draws the next action from next_strategy() without materializing it.
  int advance(RngStream& rng);

 private:
  const PolicySet* set_;
  int n_actions_;
  double mu_;
  std::vector<double> sums_;  // n_actions x n_actions, row = played action
  std::uint64_t t_ = 0;
  int current_ = 0;
};

// Verifier-side regret bookkeeping from actual counterfactual rewards
// w(alt) = 1{interference <= gamma(alt)}. Same recursion as the paper's
// partially distributed rule; never exposed to learners.
class ActualRegretTracker {
 public:
  explicit ActualRegretTracker(const PolicySet& set);

  void observe(int played, int state, double interference, bool own_ack);
  double regret(int k, int khat) const;
  double max_regret() const;
  double sum(int k, int khat) const;
  std::uint64_t horizon() const { return t_; }

 private:
  const PolicySet* set_;
  int n_actions_;
  std::vector<double> sums_;
  std::uint64_t t_ = 0;
};

struct RegretCheckpoint {
  std::uint64_t slot = 0;
  std::vector<double> max_estimated;
  std::vector<double> max_actual;  // empty unless tracking is enabled
};

struct CeOptions {
  std::uint64_t iterations = 0;
  std::vector<double> mu;  // per user; empty -> 2*(L_i - 1)
  std::uint64_t checkpoint_every = 1000;
  bool track_actual_regret = false;
};

struct CeResult {
  SparseDistribution empirical;  // f_T
  RunTrace trace;
  std::vector<RegretCheckpoint> checkpoints;
  std::vector<double> final_max_regret;
  std::vector<double> final_max_actual_regret;  // empty unless tracked
  WindowStats tail;                             // last 10% of slots
};

double default_mu(int n_actions);

CeResult run_ce_learning(const FadingModel& model, std::span<const PolicySet> sets,
                         const CeOptions& options, RngPool& rngs);

void write_regret_trace(std::ostream& os, std::span<const RegretCheckpoint> checkpoints);

}  // namespace powalloc
