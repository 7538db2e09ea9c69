#include "powalloc/sim_core.hpp"

#include "powalloc/errors.hpp"

namespace powalloc {

double received_interference(const ActionProfile& profile, const GainRealization& r,
                             std::span<const PolicySet> sets, int user) {
  const int n = static_cast<int>(sets.size());
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == user) continue;
    const PolicySet& set = sets[static_cast<std::size_t>(j)];
    const double power = set[profile.k[static_cast<std::size_t>(j)]]
                             .powers[static_cast<std::size_t>(r.direct_state[static_cast<std::size_t>(j)])];
    const double g = r.cross_gain(user, j, n);
    total += g * g * power;
  }
  return total;
}

double throughput(const RunTrace& trace, int user) {
  if (trace.horizon == 0) throw ValidationError("throughput: empty trace");
  return trace.rate_weighted_ack[static_cast<std::size_t>(user)] /
         static_cast<double>(trace.horizon);
}

SlotEngine::SlotEngine(const FadingModel& model, std::span<const PolicySet> sets)
    : model_(&model), sets_(sets) {
  const std::size_t n = static_cast<std::size_t>(model.n_users);
  tx_power_.assign(n, 0.0);
  interference_.assign(n, 0.0);
  ack_.assign(n, 0);
}

void SlotEngine::step(const ActionProfile& profile, RngStream& env, std::uint64_t slot) {
  const int n = model_->n_users;
  sample_slot_into(*model_, env, slot, realization_);
  for (int i = 0; i < n; ++i) {
    const PolicySet& set = sets_[static_cast<std::size_t>(i)];
    tx_power_[static_cast<std::size_t>(i)] =
        set[profile.k[static_cast<std::size_t>(i)]]
            .powers[static_cast<std::size_t>(realization_.direct_state[static_cast<std::size_t>(i)])];
  }
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double g = realization_.cross[static_cast<std::size_t>(i) * n + j];
      total += g * g * tx_power_[static_cast<std::size_t>(j)];
    }
    interference_[static_cast<std::size_t>(i)] = total;
    const double gamma = sets_[static_cast<std::size_t>(i)].threshold(
        profile.k[static_cast<std::size_t>(i)], realization_.direct_state[static_cast<std::size_t>(i)]);
    ack_[static_cast<std::size_t>(i)] = ack_outcome(gamma, total) ? 1 : 0;
  }
}

void SlotEngine::write_debug_row(std::ostream& os, const ActionProfile& profile) const {
  for (int i = 0; i < model_->n_users; ++i) {
    os << realization_.slot << ',' << i << ',' << profile.k[static_cast<std::size_t>(i)] << ','
       << realization_.direct_state[static_cast<std::size_t>(i)] << ','
       << interference_[static_cast<std::size_t>(i)] << ','
       << int(ack_[static_cast<std::size_t>(i)]) << '\n';
  }
}

RunTrace run_slots(const FadingModel& model, std::span<const PolicySet> sets,
                   StrategySource& source, std::uint64_t horizon, RngPool& rngs,
                   const RunOptions& options) {
  if (horizon < 1) throw ValidationError("run_slots: horizon must be >= 1");
  const int n = model.n_users;
  RunTrace trace;
  trace.ack_count.assign(static_cast<std::size_t>(n), 0);
  trace.rate_weighted_ack.assign(static_cast<std::size_t>(n), 0.0);
  trace.action_visits.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    trace.action_visits[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(sets[static_cast<std::size_t>(i)].size()), 0);
  }
  if (options.debug_csv) {
    *options.debug_csv << "slot,user,action_index,direct_state,interference,ack\n";
  }

  SlotEngine engine(model, sets);
  ActionProfile profile;
  profile.k.assign(static_cast<std::size_t>(n), 0);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      profile.k[static_cast<std::size_t>(i)] = source.choose(i, t, rngs.user(i));
    }
    engine.step(profile, rngs.env(), t);
    for (int i = 0; i < n; ++i) {
      const bool ok = engine.ack(i);
      trace.ack_count[static_cast<std::size_t>(i)] += ok ? 1 : 0;
      if (ok) {
        trace.rate_weighted_ack[static_cast<std::size_t>(i)] +=
            sets[static_cast<std::size_t>(i)].rate(profile.k[static_cast<std::size_t>(i)]);
      }
      ++trace.action_visits[static_cast<std::size_t>(i)]
            [static_cast<std::size_t>(profile.k[static_cast<std::size_t>(i)])];
    }
    if (options.count_profiles) ++trace.profile_counts[profile.k];
    if (options.debug_csv) engine.write_debug_row(*options.debug_csv, profile);
  }
  trace.horizon = horizon;
  return trace;
}

WindowStats play_window(SlotEngine& engine, const ActionProfile& profile,
                        std::uint64_t horizon, RngStream& env, std::uint64_t& slot_counter) {
  const int n = engine.n_users();
  WindowStats stats;
  stats.slots = horizon;
  stats.ack_count.assign(static_cast<std::size_t>(n), 0);
  stats.rate_weighted_ack.assign(static_cast<std::size_t>(n), 0.0);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    engine.step(profile, env, ++slot_counter);
    for (int i = 0; i < n; ++i) {
      if (engine.ack(i)) {
        ++stats.ack_count[static_cast<std::size_t>(i)];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    stats.rate_weighted_ack[static_cast<std::size_t>(i)] =
        engine.rate(i, profile.k[static_cast<std::size_t>(i)]) *
        static_cast<double>(stats.ack_count[static_cast<std::size_t>(i)]);
  }
  return stats;
}

}  // namespace powalloc
