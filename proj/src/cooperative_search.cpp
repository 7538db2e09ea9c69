#include "powalloc/cooperative_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "powalloc/errors.hpp"

namespace powalloc {

namespace {

void check_config(const SearchConfig& c, int n_users) {
  if (c.window < 1) throw ValidationError("search: window must be >= 1");
  if (c.delta <= 0.0 || c.delta > 1.0) throw ValidationError("search: delta must lie in (0,1]");
  if (c.explore_eps < 0.0 || c.explore_eps > 1.0) {
    throw ValidationError("search: explore_eps must lie in [0,1]");
  }
  if (c.max_experiments < 1) throw ValidationError("search: max_experiments must be >= 1");
  if (c.mode == SearchMode::kWeightedSum && !c.rate_weighted &&
      static_cast<int>(c.alphas.size()) != n_users) {
    throw ValidationError("search: one alpha per user required");
  }
  for (double a : c.alphas) {
    if (a <= 0.0) throw ValidationError("search: alphas must be positive");
  }
}

// States ordered by descending probability, ties by descending gain value.
std::vector<int> state_priority(const GainAlphabet& direct) {
  std::vector<int> order(static_cast<std::size_t>(direct.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = direct.pmf[static_cast<std::size_t>(a)];
    const double pb = direct.pmf[static_cast<std::size_t>(b)];
    if (pa != pb) return pa > pb;
    return direct.values[static_cast<std::size_t>(a)] > direct.values[static_cast<std::size_t>(b)];
  });
  return order;
}

std::vector<double> window_utilities(const WindowStats& w) {
  std::vector<double> u(w.ack_count.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = static_cast<double>(w.ack_count[i]) / static_cast<double>(w.slots);
  }
  return u;
}

}  // namespace

double weighted_score(const WindowStats& window, const ActionProfile& profile,
                      std::span<const PolicySet> sets, const SearchConfig& config,
                      std::span<const double> disagreement) {
  const std::vector<double> u = window_utilities(window);
  if (config.mode == SearchMode::kNashProduct) {
    double product = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      product *= std::max(u[i] - disagreement[i], 0.0);
    }
    return product;
  }
  double score = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = config.rate_weighted
                         ? sets[i].rate(profile.k[i])
                         : config.alphas[i];
    score += w * u[i];
  }
  return score;
}

int propose_local(int current, const PolicySet& set, const GainAlphabet& direct,
                  double explore_eps, RngStream& rng) {
  const int L = set.size();
  if (L < 2) throw ValidationError("propose_local: singleton-set has no alternative");

  auto uniform_other = [&]() {
    int k = rng.uniform_int(L - 1);
    return k >= current ? k + 1 : k;
  };

  if (explore_eps >= 1.0 || (explore_eps > 0.0 && rng.uniform01() < explore_eps)) {
    return uniform_other();
  }

  const std::vector<int> order = state_priority(direct);
  std::vector<int> candidates;
  for (int s : order) {
    const double cur_power = set[current].powers[static_cast<std::size_t>(s)];
    candidates.clear();
    for (int k = 0; k < L; ++k) {
      if (set[k].powers[static_cast<std::size_t>(s)] > cur_power) candidates.push_back(k);
    }
    if (!candidates.empty()) {
      return candidates[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(candidates.size())))];
    }
  }
  return uniform_other();
}

int greedy_disagreement_action(const PolicySet& set, const GainAlphabet& direct) {
  const std::vector<int> order = state_priority(direct);
  // Lexicographic maximization of power along the priority order; remaining
  // ties resolve to the lowest policy index.
  int best = 0;
  for (int k = 1; k < set.size(); ++k) {
    for (int s : order) {
      const double a = set[k].powers[static_cast<std::size_t>(s)];
      const double b = set[best].powers[static_cast<std::size_t>(s)];
      if (a > b) {
        best = k;
        break;
      }
      if (a < b) break;
    }
  }
  return best;
}

std::pair<std::vector<double>, ActionProfile> disagreement_point(
    const FadingModel& model, std::span<const PolicySet> sets, std::uint64_t t_d,
    RngStream& env) {
  if (t_d < 1) throw ValidationError("disagreement_point: t_d must be >= 1");
  const int n = model.n_users;
  ActionProfile profile;
  profile.k.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    profile.k[static_cast<std::size_t>(i)] =
        greedy_disagreement_action(sets[static_cast<std::size_t>(i)],
                                   model.direct[static_cast<std::size_t>(i)]);
  }
  SlotEngine engine(model, sets);
  std::uint64_t slot = 0;
  const WindowStats stats = play_window(engine, profile, t_d, env, slot);
  return {window_utilities(stats), profile};
}

namespace {

SearchResult run_search(const FadingModel& model, std::span<const PolicySet> sets,
                        const SearchConfig& config, RngPool& rngs,
                        std::span<const double> disagreement,
                        const ActionProfile& disagreement_profile) {
  check_config(config, model.n_users);
  const int n = model.n_users;
  SlotEngine engine(model, sets);
  std::uint64_t slot = 0;

  SearchResult result;
  Benchmark& bench = result.benchmark;
  bench.disagreement.assign(disagreement.begin(), disagreement.end());

  bench.profile.k.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bench.profile.k[static_cast<std::size_t>(i)] =
        rngs.user(i).uniform_int(sets[static_cast<std::size_t>(i)].size());
  }
  {
    const WindowStats w = play_window(engine, bench.profile, config.window, rngs.env(), slot);
    bench.score = weighted_score(w, bench.profile, sets, config, disagreement);
    bench.utilities = window_utilities(w);
  }
  result.slots_to_final = slot;

  std::vector<int> failures(static_cast<std::size_t>(n), 0);
  auto exhausted = [&]() {
    for (int i = 0; i < n; ++i) {
      if (sets[static_cast<std::size_t>(i)].size() > 1 &&
          failures[static_cast<std::size_t>(i)] < config.max_experiments) {
        return false;
      }
    }
    return true;
  };

  ActionProfile trial = bench.profile;
  int active = 0;
  while (result.rounds < config.round_cap && !exhausted()) {
    ++result.rounds;
    const int user = active;
    active = (active + 1) % n;
    const bool experiments =
        sets[static_cast<std::size_t>(user)].size() > 1 &&
        failures[static_cast<std::size_t>(user)] < config.max_experiments &&
        rngs.user(user).uniform01() < config.delta;
    if (!experiments) {
      // Everyone keeps playing the benchmark for this window.
      play_window(engine, bench.profile, config.window, rngs.env(), slot);
      continue;
    }
    const int candidate =
        propose_local(bench.profile.k[static_cast<std::size_t>(user)],
                      sets[static_cast<std::size_t>(user)],
                      model.direct[static_cast<std::size_t>(user)], config.explore_eps,
                      rngs.user(user));
    trial = bench.profile;
    trial.k[static_cast<std::size_t>(user)] = candidate;
    const WindowStats w = play_window(engine, trial, config.window, rngs.env(), slot);
    const double trial_score = weighted_score(w, trial, sets, config, disagreement);

    double benchmark_score = bench.score;
    if (config.paired_reestimate) {
      const WindowStats b = play_window(engine, bench.profile, config.window, rngs.env(), slot);
      benchmark_score = weighted_score(b, bench.profile, sets, config, disagreement);
    }

    const bool accepted = trial_score > benchmark_score;
    result.trace.push_back(SearchRound{result.rounds, user, trial_score, bench.score,
                                       accepted, slot});
    if (accepted) {
      bench.profile = trial;
      bench.score = trial_score;
      bench.utilities = window_utilities(w);
      if (!config.strict_experiment_budget) {
        std::fill(failures.begin(), failures.end(), 0);
      }
      result.slots_to_final = slot;
    } else {
      ++failures[static_cast<std::size_t>(user)];
    }
  }

  result.total_slots = slot;
  if (config.mode == SearchMode::kNashProduct && bench.score <= 0.0) {
    // degenerate-bargain: nothing beat the disagreement point.
    result.degenerate = true;
    bench.profile = disagreement_profile;
    bench.score = 0.0;
    bench.utilities.assign(disagreement.begin(), disagreement.end());
  }
  return result;
}

}  // namespace

SearchResult run_pareto_search(const FadingModel& model, std::span<const PolicySet> sets,
                               const SearchConfig& config, RngPool& rngs) {
  if (config.mode != SearchMode::kWeightedSum) {
    throw ValidationError("run_pareto_search: config.mode must be weighted-sum");
  }
  ActionProfile none;
  return run_search(model, sets, config, rngs, {}, none);
}

SearchResult run_nash_bargaining(
    const FadingModel& model, std::span<const PolicySet> sets, const SearchConfig& config,
    RngPool& rngs,
    std::optional<std::pair<std::vector<double>, ActionProfile>> forced_disagreement) {
  if (config.mode != SearchMode::kNashProduct) {
    throw ValidationError("run_nash_bargaining: config.mode must be nash-product");
  }
  auto [d, d_profile] = forced_disagreement.has_value()
                            ? std::move(*forced_disagreement)
                            : disagreement_point(model, sets, config.t_disagreement, rngs.env());
  SearchResult result = run_search(model, sets, config, rngs, d, d_profile);
  result.benchmark.disagreement = std::move(d);
  return result;
}

void write_score_trace(std::ostream& os, std::span<const SearchRound> trace) {
  os << "round,active_user,trial_score,benchmark_score,accepted\n";
  char buf[64];
  for (const SearchRound& r : trace) {
    os << r.round << ',' << r.active_user << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", r.trial_score);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", r.benchmark_score);
    os << buf << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

}  // namespace powalloc
