#include "powalloc/multiplicative_weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "powalloc/errors.hpp"

namespace powalloc {

MwLearner::MwLearner(int n_actions, double epsilon, bool visit_normalized)
    : n_actions_(n_actions),
      eps_(epsilon),
      log1me_(std::log(1.0 - epsilon)),
      visit_normalized_(visit_normalized) {
  if (epsilon <= 0.0 || epsilon >= 1.0) {
    throw ValidationError("MwLearner: epsilon must lie in (0,1)");
  }
  weights_.assign(static_cast<std::size_t>(n_actions_), 1.0);
  cum_reward_.assign(static_cast<std::size_t>(n_actions_), 0.0);
  visits_.assign(static_cast<std::size_t>(n_actions_), 0);
}

double MwLearner::empirical_utility(int k) const {
  if (visit_normalized_) {
    const std::uint64_t v = visits_[static_cast<std::size_t>(k)];
    return v == 0 ? 0.0 : cum_reward_[static_cast<std::size_t>(k)] / static_cast<double>(v);
  }
  return t_ == 0 ? 0.0 : cum_reward_[static_cast<std::size_t>(k)] / static_cast<double>(t_);
}

void MwLearner::observe(int played, bool ack) {
  ++t_;
  ++visits_[static_cast<std::size_t>(played)];
  if (ack) cum_reward_[static_cast<std::size_t>(played)] += 1.0;
  // c = -u, so the multiplier is (1-eps)^(-u) = exp(-u * log(1-eps)) >= 1.
  for (int k = 0; k < n_actions_; ++k) {
    weights_[static_cast<std::size_t>(k)] *= std::exp(-empirical_utility(k) * log1me_);
  }
}

std::vector<double> MwLearner::strategy() const { return mw_strategy(weights_); }

int MwLearner::sample(RngStream& rng) const {
  double total = 0.0;
  for (double w : weights_) total += w;
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (int k = 0; k + 1 < n_actions_; ++k) {
    acc += weights_[static_cast<std::size_t>(k)];
    if (u < acc) return k;
  }
  return n_actions_ - 1;
}

void MwLearner::renormalize() {
  const double m = *std::max_element(weights_.begin(), weights_.end());
  for (double& w : weights_) w /= m;
}

void mw_update(std::span<double> weights, std::span<const double> costs, double epsilon) {
  if (epsilon <= 0.0 || epsilon >= 1.0) {
    throw ValidationError("mw_update: epsilon must lie in (0,1)");
  }
  const double lg = std::log(1.0 - epsilon);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] *= std::exp(costs[k] * lg);
  }
}

std::vector<double> mw_strategy(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw ValidationError("mw_strategy: weights must be positive");
    total += w;
  }
  std::vector<double> p(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) p[k] = weights[k] / total;
  return p;
}

ExternalRegretTracker::ExternalRegretTracker(const PolicySet& set) : set_(&set) {
  counterfactual_.assign(static_cast<std::size_t>(set.size()), 0.0);
}

void ExternalRegretTracker::observe(int state, double interference, bool own_ack) {
  ++t_;
  realized_ += own_ack ? 1.0 : 0.0;
  for (int k = 0; k < set_->size(); ++k) {
    if (interference <= set_->threshold(k, state)) {
      counterfactual_[static_cast<std::size_t>(k)] += 1.0;
    }
  }
}

double ExternalRegretTracker::regret() const {
  if (t_ == 0) return 0.0;
  double best = 0.0;
  for (double c : counterfactual_) best = std::max(best, c - realized_);
  return best / static_cast<double>(t_);
}

CceResult run_cce_learning(const FadingModel& model, std::span<const PolicySet> sets,
                           const CceOptions& options, RngPool& rngs) {
  if (options.iterations < 1) throw ValidationError("run_cce_learning: iterations must be >= 1");
  const int n = model.n_users;
  const std::uint64_t horizon = options.iterations;
  const std::uint64_t tail_start = horizon - horizon / 10;

  std::vector<MwLearner> learners;
  learners.reserve(static_cast<std::size_t>(n));
  std::vector<ExternalRegretTracker> trackers;
  for (int i = 0; i < n; ++i) {
    learners.emplace_back(sets[static_cast<std::size_t>(i)].size(), options.epsilon,
                          options.visit_normalized_utility);
    if (options.track_external_regret) {
      trackers.emplace_back(sets[static_cast<std::size_t>(i)]);
    }
  }

  CceResult result;
  result.trace.ack_count.assign(static_cast<std::size_t>(n), 0);
  result.trace.rate_weighted_ack.assign(static_cast<std::size_t>(n), 0.0);
  result.trace.action_visits.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.trace.action_visits[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(sets[static_cast<std::size_t>(i)].size()), 0);
  }
  result.tail.ack_count.assign(static_cast<std::size_t>(n), 0);
  result.tail.rate_weighted_ack.assign(static_cast<std::size_t>(n), 0.0);
  result.phi.mean_strategy.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.phi.mean_strategy[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(sets[static_cast<std::size_t>(i)].size()), 0.0);
  }

  SlotEngine engine(model, sets);
  ActionProfile profile;
  profile.k.resize(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> snapshot(static_cast<std::size_t>(n));

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      snapshot[static_cast<std::size_t>(i)] = learners[static_cast<std::size_t>(i)].strategy();
      profile.k[static_cast<std::size_t>(i)] =
          learners[static_cast<std::size_t>(i)].sample(rngs.user(i));
      auto& mean = result.phi.mean_strategy[static_cast<std::size_t>(i)];
      const auto& q = snapshot[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += q[k];
    }
    if (t % options.snapshot_every == 0 || t == horizon) {
      result.phi.snapshots.push_back(snapshot);
    }
    engine.step(profile, rngs.env(), t);
    for (int i = 0; i < n; ++i) {
      const bool ack = engine.ack(i);
      learners[static_cast<std::size_t>(i)].observe(profile.k[static_cast<std::size_t>(i)], ack);
      if (options.track_external_regret) {
        trackers[static_cast<std::size_t>(i)].observe(engine.direct_state(i),
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
    if (options.track_external_regret &&
        (t % options.checkpoint_every == 0 || t == horizon)) {
      ExternalRegretCheckpoint cp;
      cp.slot = t;
      cp.external_regret.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        cp.external_regret[static_cast<std::size_t>(i)] =
            trackers[static_cast<std::size_t>(i)].regret();
      }
      result.checkpoints.push_back(std::move(cp));
    }
    if (t % options.renorm_every == 0) {
      for (int i = 0; i < n; ++i) learners[static_cast<std::size_t>(i)].renormalize();
    }
  }

  result.trace.horizon = horizon;
  result.tail.slots = horizon - tail_start;
  for (int i = 0; i < n; ++i) {
    for (double& v : result.phi.mean_strategy[static_cast<std::size_t>(i)]) {
      v /= static_cast<double>(horizon);
    }
  }
  if (options.track_external_regret) {
    result.final_external_regret.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      result.final_external_regret[static_cast<std::size_t>(i)] =
          trackers[static_cast<std::size_t>(i)].regret();
    }
  }
  return result;
}

void write_external_regret_trace(std::ostream& os,
                                 std::span<const ExternalRegretCheckpoint> checkpoints) {
  os << "slot,user,external_regret\n";
  char buf[64];
  for (const ExternalRegretCheckpoint& cp : checkpoints) {
    for (std::size_t i = 0; i < cp.external_regret.size(); ++i) {
      os << cp.slot << ',' << i << ',';
      std::snprintf(buf, sizeof(buf), "%.9g", cp.external_regret[i]);
      os << buf << '\n';
    }
  }
}

}  // namespace powalloc
