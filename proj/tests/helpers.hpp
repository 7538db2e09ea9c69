// Shared fixtures for the test suites: the paper-scale 3-user setup and a
// pair of small instances that the exact oracles can enumerate.
#pragma once

#include <cmath>
#include <vector>

#include "powalloc/action_space.hpp"
#include "powalloc/channel_model.hpp"
#include "powalloc/config.hpp"

namespace powalloc::testing {

inline GainAlphabet example_direct() { return uniform_alphabet({0.2, 0.6, 1.0}); }
inline GainAlphabet example_cross() { return uniform_alphabet({0.1, 0.3, 0.5}); }

// 3 users, symmetric gains, uniform pmfs, r = 0.75, levels {0,5,...,30}.
inline FadingModel example1_model() {
  return make_symmetric_model(3, example_direct(), example_cross());
}

inline std::vector<double> example_levels() { return {0, 5, 10, 15, 20, 25, 30}; }

inline std::vector<PolicySet> example1_sets(double snr_db, int n_users = 3,
                                            double rate = 0.75) {
  const double budget = snr_db_to_budget(snr_db);
  std::vector<PolicySet> sets;
  const GainAlphabet direct = example_direct();
  const std::vector<double> levels = example_levels();
  for (int i = 0; i < n_users; ++i) {
    sets.push_back(enumerate_policies(direct, levels, budget, rate, i));
  }
  return sets;
}

// Two users, two direct states, six actions per user; small enough for every
// oracle check.
inline FadingModel small2_model() {
  return make_symmetric_model(2, uniform_alphabet({0.6, 1.0}), uniform_alphabet({0.3, 0.8}));
}

inline std::vector<PolicySet> small2_sets() {
  std::vector<PolicySet> sets;
  const GainAlphabet direct = uniform_alphabet({0.6, 1.0});
  const std::vector<double> levels = {0, 6, 12};
  for (int i = 0; i < 2; ++i) {
    sets.push_back(enumerate_policies(direct, levels, /*budget=*/6.0, /*rate=*/0.75, i));
  }
  return sets;
}

// N=2 slice of Example 1 at 7 dB: 20 actions per user, 400 joint profiles.
inline FadingModel pair_model() {
  return make_symmetric_model(2, example_direct(), example_cross());
}

inline std::vector<PolicySet> pair_sets(double snr_db = 7.0) {
  return example1_sets(snr_db, /*n_users=*/2);
}

}  // namespace powalloc::testing
