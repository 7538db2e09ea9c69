// Feasible stationary power policies under an average-power budget, the
// multi-rate extension, and the per-(policy, state) ACK threshold table.
#pragma once

#include <span>
#include <vector>

#include "powalloc/channel_model.hpp"

namespace powalloc {

// A stationary action: one power level per direct-gain state plus the
// transmission rate used under this action.
struct PowerPolicy {
  std::vector<double> powers;
  double rate = 0.0;
};

// Largest interference that still yields an ACK at rate `rate` when
// transmitting `power` over direct gain `gain`:
//   gamma = |h|^2 * p / (2^r - 1) - 1.
// May be negative (power 0 gives -1, so an ACK is impossible).
double interference_threshold(double power, double gain, double rate);
double interference_threshold(const PowerPolicy& policy, const GainAlphabet& direct, double gain);

// The enumerated feasible action set of one user, indices 0..L-1 in a
// deterministic lexicographic order. Thresholds are precomputed per
// (policy, state) because learners compare them across all alternatives
// every slot.
class PolicySet {
 public:
  PolicySet(int user, std::vector<PowerPolicy> policies, const GainAlphabet& direct);

  int user() const { return user_; }
  int size() const { return static_cast<int>(policies_.size()); }
  int n_states() const { return n_states_; }
  const PowerPolicy& operator[](int k) const { return policies_[static_cast<std::size_t>(k)]; }
  double rate(int k) const { return policies_[static_cast<std::size_t>(k)].rate; }

  // gamma(k; h_state)
  double threshold(int k, int state) const {
    return thresholds_[static_cast<std::size_t>(k) * n_states_ + state];
  }
  // Row of thresholds for one state is strided; this returns gamma for every
  // policy at a fixed state into `out`.
  std::span<const double> thresholds_row(int k) const {
    return {thresholds_.data() + static_cast<std::size_t>(k) * n_states_,
            static_cast<std::size_t>(n_states_)};
  }

  bool multirate() const { return multirate_; }

 private:
  int user_;
  int n_states_;
  bool multirate_;
  std::vector<PowerPolicy> policies_;
  std::vector<double> thresholds_;
};

// All power tuples over `levels` (one level per direct state) meeting the
// average-power constraint sum_l pmf[l]*P_l <= budget, in lexicographic order
// over level indices. Throws ValidationError if no tuple is feasible.
PolicySet enumerate_policies(const GainAlphabet& direct, std::span<const double> levels,
                             double budget, double rate, int user = 0);

// Multi-rate action set: every feasible power tuple paired with every rate,
// rate-major. |result| = |rates| * |enumerate_policies(...)|.
PolicySet enumerate_multirate(const GainAlphabet& direct, std::span<const double> levels,
                              double budget, std::span<const double> rates, int user = 0);

// Average transmit power of a tuple under the state distribution.
double average_power(std::span<const double> powers, std::span<const double> pmf);

// Slack absorbed when comparing average power against the budget.
inline constexpr double kBudgetTolerance = 1e-9;

}  // namespace powalloc
