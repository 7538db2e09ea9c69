#include "powalloc/action_space.hpp"

#include <cmath>
#include <string>

#include "powalloc/errors.hpp"

namespace powalloc {

double interference_threshold(double power, double gain, double rate) {
  return gain * gain * power / (std::exp2(rate) - 1.0) - 1.0;
}

double interference_threshold(const PowerPolicy& policy, const GainAlphabet& direct,
                              double gain) {
  for (int s = 0; s < direct.size(); ++s) {
    if (direct.values[static_cast<std::size_t>(s)] == gain) {
      return interference_threshold(policy.powers[static_cast<std::size_t>(s)], gain,
                                    policy.rate);
    }
  }
  throw ValidationError("interference_threshold: gain not in direct alphabet");
}

PolicySet::PolicySet(int user, std::vector<PowerPolicy> policies, const GainAlphabet& direct)
    : user_(user), n_states_(direct.size()), policies_(std::move(policies)) {
  if (policies_.empty()) throw ValidationError("PolicySet: empty policy list");
  multirate_ = false;
  for (const PowerPolicy& p : policies_) {
    if (static_cast<int>(p.powers.size()) != n_states_) {
      throw ValidationError("PolicySet: policy length does not match alphabet");
    }
    if (p.rate <= 0.0) throw ValidationError("PolicySet: rate must be positive");
    if (p.rate != policies_.front().rate) multirate_ = true;
  }
  thresholds_.resize(policies_.size() * static_cast<std::size_t>(n_states_));
  for (std::size_t k = 0; k < policies_.size(); ++k) {
    for (int s = 0; s < n_states_; ++s) {
      thresholds_[k * n_states_ + s] =
          interference_threshold(policies_[k].powers[static_cast<std::size_t>(s)],
                                 direct.values[static_cast<std::size_t>(s)], policies_[k].rate);
    }
  }
}

double average_power(std::span<const double> powers, std::span<const double> pmf) {
  double avg = 0.0;
  for (std::size_t l = 0; l < powers.size(); ++l) avg += pmf[l] * powers[l];
  return avg;
}

namespace {

// Lexicographic odometer over level indices, last state fastest.
std::vector<PowerPolicy> feasible_tuples(const GainAlphabet& direct,
                                         std::span<const double> levels, double budget,
                                         double rate) {
  const int n = direct.size();
  const int m = static_cast<int>(levels.size());
  std::vector<PowerPolicy> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> powers(static_cast<std::size_t>(n));
  while (true) {
    for (int s = 0; s < n; ++s) powers[static_cast<std::size_t>(s)] = levels[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
    if (average_power(powers, direct.pmf) <= budget + kBudgetTolerance) {
      out.push_back(PowerPolicy{powers, rate});
    }
    int pos = n - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - 1) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
  }
  return out;
}

}  // namespace

PolicySet enumerate_policies(const GainAlphabet& direct, std::span<const double> levels,
                             double budget, double rate, int user) {
  if (levels.empty()) throw ValidationError("enumerate_policies: empty level set");
  if (budget < 0.0) throw ValidationError("enumerate_policies: negative budget");
  std::vector<PowerPolicy> tuples = feasible_tuples(direct, levels, budget, rate);
  if (tuples.empty()) {
    throw ValidationError("enumerate_policies: empty-result (no tuple meets budget " +
                          std::to_string(budget) + ")");
  }
  return PolicySet(user, std::move(tuples), direct);
}

PolicySet enumerate_multirate(const GainAlphabet& direct, std::span<const double> levels,
                              double budget, std::span<const double> rates, int user) {
  if (rates.empty()) throw ValidationError("enumerate_multirate: empty rate set");
  std::vector<PowerPolicy> all;
  for (double r : rates) {
    std::vector<PowerPolicy> tuples = feasible_tuples(direct, levels, budget, r);
    all.insert(all.end(), tuples.begin(), tuples.end());
  }
  if (all.empty()) {
    throw ValidationError("enumerate_multirate: empty-result (no tuple meets budget)");
  }
  return PolicySet(user, std::move(all), direct);
}

}  // namespace powalloc
