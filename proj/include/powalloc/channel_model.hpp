// Discrete fading environment: direct and cross link gain alphabets with
// per-link pmfs, i.i.d. across slots and independent across links.
#pragma once

#include <cstdint>
#include <vector>

#include "powalloc/rng.hpp"

namespace powalloc {

// Finite alphabet of channel gain amplitudes |h| with its pmf.
struct GainAlphabet {
  std::vector<double> values;
  std::vector<double> pmf;

  int size() const { return static_cast<int>(values.size()); }
  bool empty() const { return values.empty(); }
};

GainAlphabet uniform_alphabet(std::vector<double> values);

// N transmitter-receiver pairs. direct[i] is the alphabet of H_ii; the cross
// alphabet for receiver i / transmitter j (i != j) is stored flat at i*N+j.
// Noise power is fixed at 1 (the "1+" term in the SINR denominator).
struct FadingModel {
  int n_users = 0;
  std::vector<GainAlphabet> direct;
  std::vector<GainAlphabet> cross;
  double noise_power = 1.0;

  const GainAlphabet& cross_pair(int rx, int tx) const {
    return cross[static_cast<std::size_t>(rx) * n_users + tx];
  }
  GainAlphabet& cross_pair(int rx, int tx) {
    return cross[static_cast<std::size_t>(rx) * n_users + tx];
  }
};

// One slot's gains. direct_state[i] indexes user i's direct alphabet; cross
// values are stored flat like FadingModel::cross.
struct GainRealization {
  std::uint64_t slot = 0;
  std::vector<int> direct_state;
  std::vector<double> direct;
  std::vector<double> cross;

  double cross_gain(int rx, int tx, int n_users) const {
    return cross[static_cast<std::size_t>(rx) * n_users + tx];
  }
};

// All cross links into a receiver share one alphabet; covers the paper-style
// symmetric setups.
FadingModel make_symmetric_model(int n_users, GainAlphabet direct, GainAlphabet cross);

// Same, but with a per-receiver pmf over the shared cross values.
FadingModel make_model_with_cross_pmfs(int n_users, GainAlphabet direct,
                                       std::vector<double> cross_values,
                                       const std::vector<std::vector<double>>& cross_pmfs);

// Returns the model iff every alphabet invariant holds and every cross pair
// is populated; throws ValidationError otherwise.
const FadingModel& validate_model(const FadingModel& model);

// Draws one slot of gains, each link independent. Same stream state =>
// identical realization.
GainRealization sample_slot(const FadingModel& model, RngStream& env, std::uint64_t slot = 0);

// In-place variant for hot loops; `out` is resized as needed.
void sample_slot_into(const FadingModel& model, RngStream& env, std::uint64_t slot,
                      GainRealization& out);

// pi^(i)(state) of the direct link.
double state_probability(const FadingModel& model, int user, int state);

// pmf entry of the cross link into receiver rx from transmitter tx.
double cross_state_probability(const FadingModel& model, int rx, int tx, int state);

}  // namespace powalloc
