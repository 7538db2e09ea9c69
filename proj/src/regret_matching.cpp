#include "powalloc/regret_matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "powalloc/errors.hpp"

namespace powalloc {

int estimated_reward(bool own_ack, int played, int alt, int state, const PolicySet& set) {
  if (alt == played) return own_ack ? 1 : 0;
  if (own_ack) return 1;
  return set.threshold(alt, state) > set.threshold(played, state) ? 1 : 0;
}

double default_mu(int n_actions) { return std::max(1.0, 2.0 * (n_actions - 1)); }

RegretLearner::RegretLearner(const PolicySet& set, double mu)
    : set_(&set), n_actions_(set.size()), mu_(mu) {
  if (n_actions_ > 1 && mu_ < static_cast<double>(n_actions_ - 1)) {
    throw ValidationError("RegretLearner: mu must be >= L-1 (got " + std::to_string(mu_) + ")");
  }
  sums_.assign(static_cast<std::size_t>(n_actions_) * n_actions_, 0.0);
}

void RegretLearner::reset(int initial_action) {
  std::fill(sums_.begin(), sums_.end(), 0.0);
  t_ = 0;
  current_ = initial_action;
}

void RegretLearner::observe(bool own_ack, int state) {
  ++t_;
  if (own_ack) return;  // estimated difference is zero for every alternative
  const double own = set_->threshold(current_, state);
  double* row = sums_.data() + static_cast<std::size_t>(current_) * n_actions_;
  for (int k = 0; k < n_actions_; ++k) {
    if (set_->threshold(k, state) > own) row[k] += 1.0;
  }
}

double RegretLearner::regret(int k, int khat) const {
  if (t_ == 0) return 0.0;
  return std::max(0.0, sums_[static_cast<std::size_t>(k) * n_actions_ + khat] /
                           static_cast<double>(t_));
}

double RegretLearner::max_regret() const {
  if (t_ == 0) return 0.0;
  double m = 0.0;
  for (double s : sums_) m = std::max(m, s);
  return m / static_cast<double>(t_);
}

std::vector<double> RegretLearner::next_strategy() const {
  std::vector<double> p(static_cast<std::size_t>(n_actions_), 0.0);
  if (n_actions_ == 1 || t_ == 0) {
    p[static_cast<std::size_t>(current_)] = 1.0;
    return p;
  }
  const double* row = sums_.data() + static_cast<std::size_t>(current_) * n_actions_;
  double stay = 1.0;
  for (int k = 0; k < n_actions_; ++k) {
    if (k == current_) continue;
    const double pk = std::max(0.0, row[k]) / (static_cast<double>(t_) * mu_);
    p[static_cast<std::size_t>(k)] = pk;
    stay -= pk;
  }
  if (stay < -1e-12) {
    throw ValidationError("next_strategy: invalid-mu (stay probability negative)");
  }
  p[static_cast<std::size_t>(current_)] = std::max(0.0, stay);
  return p;
}

int RegretLearner::advance(RngStream& rng) {
  if (n_actions_ > 1 && t_ > 0) {
    const double u = rng.uniform01();
    const double* row = sums_.data() + static_cast<std::size_t>(current_) * n_actions_;
    const double inv = 1.0 / (static_cast<double>(t_) * mu_);
    double acc = 0.0;
    for (int k = 0; k < n_actions_; ++k) {
      if (k == current_) continue;
      if (row[k] > 0.0) {
        acc += row[k] * inv;
        if (u < acc) {
          current_ = k;
          return current_;
        }
      }
    }
    if (acc > 1.0 + 1e-9) {
      throw ValidationError("advance: invalid-mu (switch mass exceeds 1)");
    }
  }
  return current_;
}

ActualRegretTracker::ActualRegretTracker(const PolicySet& set)
    : set_(&set), n_actions_(set.size()) {
  sums_.assign(static_cast<std::size_t>(n_actions_) * n_actions_, 0.0);
}

void ActualRegretTracker::observe(int played, int state, double interference, bool own_ack) {
  ++t_;
  const double w = own_ack ? 1.0 : 0.0;
  double* row = sums_.data() + static_cast<std::size_t>(played) * n_actions_;
  for (int k = 0; k < n_actions_; ++k) {
    const double counterfactual = interference <= set_->threshold(k, state) ? 1.0 : 0.0;
    row[k] += counterfactual - w;
  }
}

double ActualRegretTracker::sum(int k, int khat) const {
  return sums_[static_cast<std::size_t>(k) * n_actions_ + khat];
}

double ActualRegretTracker::regret(int k, int khat) const {
  if (t_ == 0) return 0.0;
  return std::max(0.0, sum(k, khat) / static_cast<double>(t_));
}

double ActualRegretTracker::max_regret() const {
  if (t_ == 0) return 0.0;
  double m = 0.0;
  for (double s : sums_) m = std::max(m, s);
  return m / static_cast<double>(t_);
}

CeResult run_ce_learning(const FadingModel& model, std::span<const PolicySet> sets,
                         const CeOptions& options, RngPool& rngs) {
  if (options.iterations < 1) throw ValidationError("run_ce_learning: iterations must be >= 1");
  const int n = model.n_users;
  const std::uint64_t horizon = options.iterations;
  const std::uint64_t tail_start = horizon - horizon / 10;

  std::vector<RegretLearner> learners;
  learners.reserve(static_cast<std::size_t>(n));
  std::vector<ActualRegretTracker> trackers;
  for (int i = 0; i < n; ++i) {
    const double mu = options.mu.empty()
                          ? default_mu(sets[static_cast<std::size_t>(i)].size())
                          : options.mu[static_cast<std::size_t>(i)];
    learners.emplace_back(sets[static_cast<std::size_t>(i)], mu);
    learners.back().reset(rngs.user(i).uniform_int(sets[static_cast<std::size_t>(i)].size()));
    if (options.track_actual_regret) {
      trackers.emplace_back(sets[static_cast<std::size_t>(i)]);
    }
  }

  CeResult result;
  result.trace.ack_count.assign(static_cast<std::size_t>(n), 0);
  result.trace.rate_weighted_ack.assign(static_cast<std::size_t>(n), 0.0);
  result.trace.action_visits.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.trace.action_visits[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(sets[static_cast<std::size_t>(i)].size()), 0);
  }
  result.tail.ack_count.assign(static_cast<std::size_t>(n), 0);
  result.tail.rate_weighted_ack.assign(static_cast<std::size_t>(n), 0.0);

  SlotEngine engine(model, sets);
  ActionProfile profile;
  profile.k.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    profile.k[static_cast<std::size_t>(i)] = learners[static_cast<std::size_t>(i)].current_action();
  }

  auto checkpoint = [&](std::uint64_t slot) {
    RegretCheckpoint cp;
    cp.slot = slot;
    cp.max_estimated.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      cp.max_estimated[static_cast<std::size_t>(i)] =
          learners[static_cast<std::size_t>(i)].max_regret();
    }
    if (options.track_actual_regret) {
      cp.max_actual.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        cp.max_actual[static_cast<std::size_t>(i)] =
            trackers[static_cast<std::size_t>(i)].max_regret();
      }
    }
    result.checkpoints.push_back(std::move(cp));
  };

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    engine.step(profile, rngs.env(), t);
    for (int i = 0; i < n; ++i) {
      const bool ack = engine.ack(i);
      learners[static_cast<std::size_t>(i)].observe(ack, engine.direct_state(i));
      if (options.track_actual_regret) {
        trackers[static_cast<std::size_t>(i)].observe(profile.k[static_cast<std::size_t>(i)],
                                                      engine.direct_state(i),
                                                      engine.interference(i), ack);
      }
      result.trace.ack_count[static_cast<std::size_t>(i)] += ack ? 1 : 0;
      if (ack) {
        result.trace.rate_weighted_ack[static_cast<std::size_t>(i)] +=
            sets[static_cast<std::size_t>(i)].rate(profile.k[static_cast<std::size_t>(i)]);
      }
      ++result.trace.action_visits[static_cast<std::size_t>(i)]
            [static_cast<std::size_t>(profile.k[static_cast<std::size_t>(i)])];
      if (t > tail_start) {
        result.tail.ack_count[static_cast<std::size_t>(i)] += ack ? 1 : 0;
        if (ack) {
          result.tail.rate_weighted_ack[static_cast<std::size_t>(i)] +=
              sets[static_cast<std::size_t>(i)].rate(profile.k[static_cast<std::size_t>(i)]);
        }
      }
    }
    ++result.trace.profile_counts[profile.k];
    if (t % options.checkpoint_every == 0 || t == horizon) checkpoint(t);
    for (int i = 0; i < n; ++i) {
      profile.k[static_cast<std::size_t>(i)] = learners[static_cast<std::size_t>(i)].advance(rngs.user(i));
    }
  }
  result.trace.horizon = horizon;
  result.tail.slots = horizon - tail_start;
  result.empirical = empirical_distribution(result.trace);
  result.final_max_regret.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.final_max_regret[static_cast<std::size_t>(i)] =
        learners[static_cast<std::size_t>(i)].max_regret();
  }
  if (options.track_actual_regret) {
    result.final_max_actual_regret.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      result.final_max_actual_regret[static_cast<std::size_t>(i)] =
          trackers[static_cast<std::size_t>(i)].max_regret();
    }
  }
  return result;
}

void write_regret_trace(std::ostream& os, std::span<const RegretCheckpoint> checkpoints) {
  os << "slot,user,max_estimated_regret,max_actual_regret\n";
  char buf[64];
  for (const RegretCheckpoint& cp : checkpoints) {
    for (std::size_t i = 0; i < cp.max_estimated.size(); ++i) {
      os << cp.slot << ',' << i << ',';
      std::snprintf(buf, sizeof(buf), "%.9g", cp.max_estimated[i]);
      os << buf << ',';
      if (i < cp.max_actual.size()) {
        std::snprintf(buf, sizeof(buf), "%.9g", cp.max_actual[i]);
        os << buf;
      }
      os << '\n';
    }
  }
}

}  // namespace powalloc
