#include "powalloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "powalloc/errors.hpp"

namespace powalloc {

namespace {

constexpr double kProbTolerance = 1e-9;
constexpr double kPassSlack = 1e-9;

// Contribution of one interferer to the receiver's interference:
// x = g^2 * P_j(l_j) with probability pi_j(l_j) * pi_c(g).
struct Contribution {
  double value;
  double prob;
};

std::vector<Contribution> interferer_contributions(const FadingModel& model,
                                                   const PolicySet& set_j, int rx, int tx,
                                                   int action_j) {
  const GainAlphabet& dir = model.direct[static_cast<std::size_t>(tx)];
  const GainAlphabet& cr = model.cross_pair(rx, tx);
  std::vector<Contribution> out;
  out.reserve(static_cast<std::size_t>(dir.size()) * cr.size());
  for (int l = 0; l < dir.size(); ++l) {
    const double power = set_j[action_j].powers[static_cast<std::size_t>(l)];
    for (int c = 0; c < cr.size(); ++c) {
      const double g = cr.values[static_cast<std::size_t>(c)];
      out.push_back({g * g * power,
                     dir.pmf[static_cast<std::size_t>(l)] * cr.pmf[static_cast<std::size_t>(c)]});
    }
  }
  return out;
}

std::uint64_t joint_profile_count(std::span<const PolicySet> sets) {
  std::uint64_t total = 1;
  for (const PolicySet& s : sets) {
    total *= static_cast<std::uint64_t>(s.size());
    if (total > kProfileEnumGuard) return total;
  }
  return total;
}

// Iterates all joint profiles in lexicographic order (last user fastest).
template <typename Fn>
void for_each_profile(std::span<const PolicySet> sets, Fn&& fn) {
  const int n = static_cast<int>(sets.size());
  ActionProfile p;
  p.k.assign(static_cast<std::size_t>(n), 0);
  while (true) {
    fn(p);
    int pos = n - 1;
    while (pos >= 0 && p.k[static_cast<std::size_t>(pos)] ==
                           sets[static_cast<std::size_t>(pos)].size() - 1) {
      p.k[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++p.k[static_cast<std::size_t>(pos)];
  }
}

}  // namespace

SparseDistribution empirical_distribution(const RunTrace& trace) {
  SparseDistribution d;
  const double t = static_cast<double>(trace.horizon);
  for (const auto& [profile, count] : trace.profile_counts) {
    d.prob[profile] = static_cast<double>(count) / t;
  }
  return d;
}

void validate_distribution(const SparseDistribution& d) {
  double total = 0.0;
  for (const auto& [profile, p] : d.prob) {
    if (p < 0.0) throw ValidationError("distribution: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw ValidationError("distribution: probabilities sum to " + std::to_string(total));
  }
}

ExactUtilityOracle::ExactUtilityOracle(const FadingModel& model, std::span<const PolicySet> sets,
                                       std::uint64_t eval_guard)
    : model_(&model), sets_(sets) {
  for (int i = 0; i < model.n_users; ++i) {
    std::uint64_t leaves = static_cast<std::uint64_t>(model.direct[static_cast<std::size_t>(i)].size());
    for (int j = 0; j < model.n_users; ++j) {
      if (j == i) continue;
      leaves *= static_cast<std::uint64_t>(model.direct[static_cast<std::size_t>(j)].size()) *
                model.cross_pair(i, j).size();
      if (leaves > eval_guard) {
        throw InstanceTooLargeError(
            "exact_utility: joint state enumeration exceeds guard (" +
            std::to_string(eval_guard) + " evaluations); use regret certificates instead");
      }
    }
  }
}

double ExactUtilityOracle::compute(int user, const ActionProfile& profile) const {
  const int n = model_->n_users;
  // Per-interferer contribution pmfs, then an exhaustive walk over the joint
  // contribution support. For each leaf the mass is added to every own state
  // whose threshold admits the accumulated interference.
  std::vector<std::vector<Contribution>> contribs;
  contribs.reserve(static_cast<std::size_t>(n) - 1);
  for (int j = 0; j < n; ++j) {
    if (j == user) continue;
    contribs.push_back(interferer_contributions(*model_, sets_[static_cast<std::size_t>(j)],
                                                user, j, profile.k[static_cast<std::size_t>(j)]));
  }
  const GainAlphabet& own = model_->direct[static_cast<std::size_t>(user)];
  const PolicySet& own_set = sets_[static_cast<std::size_t>(user)];
  const int own_action = profile.k[static_cast<std::size_t>(user)];

  double result = 0.0;
  auto walk = [&](auto&& self, std::size_t depth, double sum, double prob) -> void {
    if (depth == contribs.size()) {
      for (int s = 0; s < own.size(); ++s) {
        if (sum <= own_set.threshold(own_action, s)) {
          result += prob * own.pmf[static_cast<std::size_t>(s)];
        }
      }
      return;
    }
    for (const Contribution& c : contribs[depth]) {
      self(self, depth + 1, sum + c.value, prob * c.prob);
    }
  };
  walk(walk, 0, 0.0, 1.0);
  return result;
}

double ExactUtilityOracle::utility(int user, const ActionProfile& profile) {
  auto key = std::make_pair(user, profile.k);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double u = compute(user, profile);
  if (cache_.size() < kCacheCapacity) cache_.emplace(std::move(key), u);
  return u;
}

std::vector<double> ExactUtilityOracle::utilities(const ActionProfile& profile) {
  std::vector<double> out(static_cast<std::size_t>(model_->n_users));
  for (int i = 0; i < model_->n_users; ++i) out[static_cast<std::size_t>(i)] = utility(i, profile);
  return out;
}

std::vector<double> exact_utility(const FadingModel& model, std::span<const PolicySet> sets,
                                  const ActionProfile& profile) {
  ExactUtilityOracle oracle(model, sets);
  return oracle.utilities(profile);
}

EquilibriumCheck is_epsilon_ce(const SparseDistribution& phi, const FadingModel& model,
                               std::span<const PolicySet> sets, double eps) {
  validate_distribution(phi);
  std::uint64_t swaps = 0;
  for (const PolicySet& s : sets) swaps += static_cast<std::uint64_t>(s.size());
  if (phi.prob.size() * swaps > kProfileEnumGuard) {
    throw InstanceTooLargeError("is_epsilon_ce: support x action count exceeds guard");
  }
  ExactUtilityOracle oracle(model, sets);

  EquilibriumCheck check;
  check.epsilon = eps;
  check.max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.n_users; ++i) {
    const int li = sets[static_cast<std::size_t>(i)].size();
    // gain[k * L + khat] accumulates the conditional swap gain.
    std::vector<double> gain(static_cast<std::size_t>(li) * li, 0.0);
    ActionProfile swapped;
    for (const auto& [profile, p] : phi.prob) {
      if (p == 0.0) continue;
      const int k = profile[static_cast<std::size_t>(i)];
      swapped.k = profile;
      const double base = oracle.utility(i, swapped);
      for (int khat = 0; khat < li; ++khat) {
        if (khat == k) continue;
        swapped.k[static_cast<std::size_t>(i)] = khat;
        gain[static_cast<std::size_t>(k) * li + khat] += p * (oracle.utility(i, swapped) - base);
        swapped.k[static_cast<std::size_t>(i)] = k;
      }
    }
    for (int k = 0; k < li; ++k) {
      for (int khat = 0; khat < li; ++khat) {
        if (khat == k) continue;
        const double g = gain[static_cast<std::size_t>(k) * li + khat];
        if (g > check.max_violation) {
          check.max_violation = g;
          check.witness_user = i;
          check.witness_action = k;
          check.witness_deviation = khat;
        }
      }
    }
  }
  if (!std::isfinite(check.max_violation)) check.max_violation = 0.0;
  check.pass = check.max_violation <= eps + kPassSlack;
  return check;
}

EquilibriumCheck is_epsilon_cce(const SparseDistribution& phi, const FadingModel& model,
                                std::span<const PolicySet> sets, double eps) {
  validate_distribution(phi);
  std::uint64_t swaps = 0;
  for (const PolicySet& s : sets) swaps += static_cast<std::uint64_t>(s.size());
  if (phi.prob.size() * swaps > kProfileEnumGuard) {
    throw InstanceTooLargeError("is_epsilon_cce: support x action count exceeds guard");
  }
  ExactUtilityOracle oracle(model, sets);

  EquilibriumCheck check;
  check.epsilon = eps;
  check.max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.n_users; ++i) {
    const int li = sets[static_cast<std::size_t>(i)].size();
    std::vector<double> gain(static_cast<std::size_t>(li), 0.0);
    ActionProfile swapped;
    for (const auto& [profile, p] : phi.prob) {
      if (p == 0.0) continue;
      swapped.k = profile;
      const double base = oracle.utility(i, swapped);
      const int k = profile[static_cast<std::size_t>(i)];
      for (int khat = 0; khat < li; ++khat) {
        swapped.k[static_cast<std::size_t>(i)] = khat;
        gain[static_cast<std::size_t>(khat)] += p * (oracle.utility(i, swapped) - base);
        swapped.k[static_cast<std::size_t>(i)] = k;
      }
    }
    for (int khat = 0; khat < li; ++khat) {
      if (gain[static_cast<std::size_t>(khat)] > check.max_violation) {
        check.max_violation = gain[static_cast<std::size_t>(khat)];
        check.witness_user = i;
        check.witness_deviation = khat;
      }
    }
  }
  if (!std::isfinite(check.max_violation)) check.max_violation = 0.0;
  check.pass = check.max_violation <= eps + kPassSlack;
  return check;
}

EquilibriumCheck is_epsilon_cce(const AveragedProductDistribution& phi, const FadingModel& model,
                                std::span<const PolicySet> sets, double eps) {
  if (phi.snapshots.empty()) throw ValidationError("is_epsilon_cce: no strategy snapshots");
  const std::uint64_t joint = joint_profile_count(sets);
  if (joint > kProfileEnumGuard) {
    throw InstanceTooLargeError("is_epsilon_cce: joint profile count exceeds guard");
  }
  const int n = model.n_users;
  ExactUtilityOracle oracle(model, sets);

  // Utility tables over the joint profile space, one per user; the swapped
  // profile index is reachable by a stride jump.
  std::vector<std::uint64_t> stride(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] *
        static_cast<std::uint64_t>(sets[static_cast<std::size_t>(i + 1)].size());
  }
  std::vector<std::vector<double>> util(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) util[static_cast<std::size_t>(i)].resize(joint);
  {
    std::uint64_t idx = 0;
    for_each_profile(sets, [&](const ActionProfile& p) {
      for (int i = 0; i < n; ++i) {
        util[static_cast<std::size_t>(i)][idx] = oracle.utility(i, p);
      }
      ++idx;
    });
  }

  const double cw = 1.0 / static_cast<double>(phi.snapshots.size());
  std::vector<double> base(static_cast<std::size_t>(n), 0.0);
  std::vector<std::vector<double>> dev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dev[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(sets[static_cast<std::size_t>(i)].size()), 0.0);
  }
  for (const auto& snapshot : phi.snapshots) {
    std::uint64_t idx = 0;
    for_each_profile(sets, [&](const ActionProfile& p) {
      double prob = cw;
      for (int j = 0; j < n; ++j) {
        prob *= snapshot[static_cast<std::size_t>(j)]
                        [static_cast<std::size_t>(p.k[static_cast<std::size_t>(j)])];
      }
      if (prob != 0.0) {
        for (int i = 0; i < n; ++i) {
          base[static_cast<std::size_t>(i)] += prob * util[static_cast<std::size_t>(i)][idx];
          const int li = sets[static_cast<std::size_t>(i)].size();
          const std::uint64_t off =
              idx - static_cast<std::uint64_t>(p.k[static_cast<std::size_t>(i)]) *
                        stride[static_cast<std::size_t>(i)];
          for (int khat = 0; khat < li; ++khat) {
            dev[static_cast<std::size_t>(i)][static_cast<std::size_t>(khat)] +=
                prob * util[static_cast<std::size_t>(i)]
                           [off + static_cast<std::uint64_t>(khat) * stride[static_cast<std::size_t>(i)]];
          }
        }
      }
      ++idx;
    });
  }

  EquilibriumCheck check;
  check.epsilon = eps;
  check.max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int khat = 0; khat < sets[static_cast<std::size_t>(i)].size(); ++khat) {
      const double g = dev[static_cast<std::size_t>(i)][static_cast<std::size_t>(khat)] -
                       base[static_cast<std::size_t>(i)];
      if (g > check.max_violation) {
        check.max_violation = g;
        check.witness_user = i;
        check.witness_deviation = khat;
      }
    }
  }
  if (!std::isfinite(check.max_violation)) check.max_violation = 0.0;
  check.pass = check.max_violation <= eps + kPassSlack;
  return check;
}

ParetoOptimum brute_force_pareto(const FadingModel& model, std::span<const PolicySet> sets,
                                 std::span<const double> alphas, bool rate_weighted) {
  if (!rate_weighted && static_cast<int>(alphas.size()) != model.n_users) {
    throw ValidationError("brute_force_pareto: one alpha per user required");
  }
  if (joint_profile_count(sets) > kProfileEnumGuard) {
    throw InstanceTooLargeError("brute_force_pareto: joint profile count exceeds guard");
  }
  ExactUtilityOracle oracle(model, sets);
  ParetoOptimum best;
  best.score = -std::numeric_limits<double>::infinity();
  for_each_profile(sets, [&](const ActionProfile& p) {
    double score = 0.0;
    std::vector<double> u(static_cast<std::size_t>(model.n_users));
    for (int i = 0; i < model.n_users; ++i) {
      u[static_cast<std::size_t>(i)] = oracle.utility(i, p);
      const double w = rate_weighted
                           ? sets[static_cast<std::size_t>(i)].rate(p.k[static_cast<std::size_t>(i)])
                           : alphas[static_cast<std::size_t>(i)];
      score += w * u[static_cast<std::size_t>(i)];
    }
    if (score > best.score) {
      best.score = score;
      best.profile = p;
      best.utilities = std::move(u);
    }
  });
  return best;
}

NashOptimum brute_force_nb(const FadingModel& model, std::span<const PolicySet> sets,
                           std::span<const double> disagreement,
                           const ActionProfile& disagreement_profile) {
  if (static_cast<int>(disagreement.size()) != model.n_users) {
    throw ValidationError("brute_force_nb: one disagreement utility per user required");
  }
  if (joint_profile_count(sets) > kProfileEnumGuard) {
    throw InstanceTooLargeError("brute_force_nb: joint profile count exceeds guard");
  }
  ExactUtilityOracle oracle(model, sets);
  NashOptimum best;
  best.product = 0.0;
  bool found = false;
  for_each_profile(sets, [&](const ActionProfile& p) {
    double product = 1.0;
    std::vector<double> u(static_cast<std::size_t>(model.n_users));
    for (int i = 0; i < model.n_users; ++i) {
      u[static_cast<std::size_t>(i)] = oracle.utility(i, p);
      product *= std::max(u[static_cast<std::size_t>(i)] - disagreement[static_cast<std::size_t>(i)], 0.0);
    }
    if (product > best.product) {
      best.product = product;
      best.profile = p;
      best.utilities = std::move(u);
      found = true;
    }
  });
  if (!found) {
    best.profile = disagreement_profile;
    best.product = 0.0;
    best.utilities = oracle.utilities(disagreement_profile);
  }
  return best;
}

VerificationRow to_row(const std::string& check, const EquilibriumCheck& c) {
  VerificationRow row;
  row.check = check;
  row.epsilon = c.epsilon;
  row.max_violation = c.max_violation;
  row.witness_user = c.witness_user;
  row.witness_action = c.witness_action;
  row.witness_deviation = c.witness_deviation;
  row.pass = c.pass;
  return row;
}

void write_verification_report(std::ostream& os, std::span<const VerificationRow> rows) {
  os << "check,epsilon,max_violation,witness_user,witness_action,witness_deviation,pass\n";
  char buf[64];
  for (const VerificationRow& r : rows) {
    os << r.check << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", r.epsilon);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", r.max_violation);
    os << buf << ',' << r.witness_user << ',' << r.witness_action << ','
       << r.witness_deviation << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

}  // namespace powalloc
