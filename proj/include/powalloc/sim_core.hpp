// Slotted play: interference, ACK/NACK rewards and streaming trace
// aggregates. A run is single-threaded and deterministic given its streams.
#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "powalloc/action_space.hpp"
#include "powalloc/channel_model.hpp"

namespace powalloc {

// One policy index per user.
struct ActionProfile {
  std::vector<int> k;

  bool operator==(const ActionProfile& o) const = default;
  auto operator<=>(const ActionProfile& o) const = default;
};

// Interference at receiver `user`: sum over j != user of |h_uj|^2 * P_j where
// P_j is transmitter j's power at its own direct state.
double received_interference(const ActionProfile& profile, const GainRealization& r,
                             std::span<const PolicySet> sets, int user);

// ACK iff interference <= threshold; the boundary counts as success.
inline bool ack_outcome(double gamma, double interference) { return interference <= gamma; }

struct SlotOutcome {
  std::uint64_t slot = 0;
  GainRealization realization;
  ActionProfile profile;
  std::vector<double> interference;
  std::vector<std::uint8_t> ack;
};

// Streaming aggregates of a run; full slot logs are an opt-in debug stream.
struct RunTrace {
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> ack_count;
  std::vector<double> rate_weighted_ack;  // sum_t r(k_t) * w_t
  std::vector<std::vector<std::uint64_t>> action_visits;
  std::map<std::vector<int>, std::uint64_t> profile_counts;
};

// (1/T) sum_t r(k_t) w_t; in fixed-rate mode this is r_i times the empirical
// success probability.
double throughput(const RunTrace& trace, int user);

// Per-slot action supplier for run_slots.
class StrategySource {
 public:
  virtual ~StrategySource() = default;
  virtual int choose(int user, std::uint64_t slot, RngStream& user_rng) = 0;
};

class FixedProfileSource : public StrategySource {
 public:
  explicit FixedProfileSource(ActionProfile profile) : profile_(std::move(profile)) {}
  int choose(int user, std::uint64_t, RngStream&) override {
    return profile_.k[static_cast<std::size_t>(user)];
  }

 private:
  ActionProfile profile_;
};

class MixedStrategySource : public StrategySource {
 public:
  explicit MixedStrategySource(std::vector<std::vector<double>> pmfs)
      : pmfs_(std::move(pmfs)) {}
  int choose(int user, std::uint64_t, RngStream& rng) override {
    return rng.sample_pmf(pmfs_[static_cast<std::size_t>(user)]);
  }

 private:
  std::vector<std::vector<double>> pmfs_;
};

struct RunOptions {
  bool count_profiles = true;
  // When set, writes one CSV row per (slot, user):
  // slot,user,action_index,direct_state,interference,ack
  std::ostream* debug_csv = nullptr;
};

RunTrace run_slots(const FadingModel& model, std::span<const PolicySet> sets,
                   StrategySource& source, std::uint64_t horizon, RngPool& rngs,
                   const RunOptions& options = {});

// Shared slot mechanics for the learning loops: samples gains and computes
// interference and ACKs for a given profile. Buffers are reused across slots.
class SlotEngine {
 public:
  SlotEngine(const FadingModel& model, std::span<const PolicySet> sets);

  // Advances one slot; results stay valid until the next call.
  void step(const ActionProfile& profile, RngStream& env, std::uint64_t slot);

  const GainRealization& realization() const { return realization_; }
  int direct_state(int user) const {
    return realization_.direct_state[static_cast<std::size_t>(user)];
  }
  double interference(int user) const { return interference_[static_cast<std::size_t>(user)]; }
  bool ack(int user) const { return ack_[static_cast<std::size_t>(user)] != 0; }
  double threshold(int user, int action) const {
    return sets_[static_cast<std::size_t>(user)].threshold(action, direct_state(user));
  }
  double rate(int user, int action) const {
    return sets_[static_cast<std::size_t>(user)].rate(action);
  }
  int n_users() const { return model_->n_users; }

  void write_debug_row(std::ostream& os, const ActionProfile& profile) const;

 private:
  const FadingModel* model_;
  std::span<const PolicySet> sets_;
  GainRealization realization_;
  std::vector<double> tx_power_;
  std::vector<double> interference_;
  std::vector<std::uint8_t> ack_;
};

// Per-user tallies of one evaluation window.
struct WindowStats {
  std::uint64_t slots = 0;
  std::vector<std::uint64_t> ack_count;
  std::vector<double> rate_weighted_ack;
};

// Plays `profile` for `horizon` slots and tallies ACKs of every user (the
// overheard-ACK capability used by the cooperative search).
WindowStats play_window(SlotEngine& engine, const ActionProfile& profile,
                        std::uint64_t horizon, RngStream& env, std::uint64_t& slot_counter);

}  // namespace powalloc
