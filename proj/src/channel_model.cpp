#include "powalloc/channel_model.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "powalloc/errors.hpp"

namespace powalloc {

namespace {

constexpr double kPmfTolerance = 1e-12;

void check_alphabet(const GainAlphabet& a, const std::string& where) {
  if (a.values.empty()) throw ValidationError(where + ": empty alphabet");
  if (a.values.size() != a.pmf.size()) {
    throw ValidationError(where + ": values/pmf length mismatch");
  }
  double total = 0.0;
  for (double p : a.pmf) {
    if (p < 0.0) throw ValidationError(where + ": malformed-pmf (negative entry)");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw ValidationError(where + ": malformed-pmf (sum " + std::to_string(total) + " != 1)");
  }
  std::unordered_set<double> seen;
  for (double v : a.values) {
    if (v < 0.0) throw ValidationError(where + ": negative gain");
    if (!seen.insert(v).second) throw ValidationError(where + ": duplicate gain value");
  }
}

}  // namespace

GainAlphabet uniform_alphabet(std::vector<double> values) {
  GainAlphabet a;
  a.pmf.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  a.values = std::move(values);
  return a;
}

FadingModel make_symmetric_model(int n_users, GainAlphabet direct, GainAlphabet cross) {
  FadingModel m;
  m.n_users = n_users;
  m.direct.assign(static_cast<std::size_t>(n_users), direct);
  m.cross.assign(static_cast<std::size_t>(n_users) * n_users, GainAlphabet{});
  for (int i = 0; i < n_users; ++i) {
    for (int j = 0; j < n_users; ++j) {
      if (i != j) m.cross_pair(i, j) = cross;
    }
  }
  return m;
}

FadingModel make_model_with_cross_pmfs(int n_users, GainAlphabet direct,
                                       std::vector<double> cross_values,
                                       const std::vector<std::vector<double>>& cross_pmfs) {
  if (static_cast<int>(cross_pmfs.size()) != n_users) {
    throw ValidationError("cross pmf list must have one entry per receiver");
  }
  FadingModel m;
  m.n_users = n_users;
  m.direct.assign(static_cast<std::size_t>(n_users), direct);
  m.cross.assign(static_cast<std::size_t>(n_users) * n_users, GainAlphabet{});
  for (int i = 0; i < n_users; ++i) {
    GainAlphabet a;
    a.values = cross_values;
    a.pmf = cross_pmfs[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_users; ++j) {
      if (i != j) m.cross_pair(i, j) = a;
    }
  }
  return m;
}

const FadingModel& validate_model(const FadingModel& model) {
  if (model.n_users < 1) throw ValidationError("model: n_users must be >= 1");
  if (static_cast<int>(model.direct.size()) != model.n_users) {
    throw ValidationError("model: one direct alphabet per user required");
  }
  if (model.cross.size() != static_cast<std::size_t>(model.n_users) * model.n_users) {
    throw ValidationError("model: cross table must be n_users x n_users");
  }
  for (int i = 0; i < model.n_users; ++i) {
    check_alphabet(model.direct[static_cast<std::size_t>(i)],
                   "direct[" + std::to_string(i) + "]");
  }
  for (int i = 0; i < model.n_users; ++i) {
    for (int j = 0; j < model.n_users; ++j) {
      if (i == j) continue;
      const GainAlphabet& a = model.cross_pair(i, j);
      if (a.empty()) {
        throw ValidationError("missing cross pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      check_alphabet(a, "cross(" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  return model;
}

void sample_slot_into(const FadingModel& model, RngStream& env, std::uint64_t slot,
                      GainRealization& out) {
  const int n = model.n_users;
  out.slot = slot;
  out.direct_state.resize(static_cast<std::size_t>(n));
  out.direct.resize(static_cast<std::size_t>(n));
  out.cross.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const GainAlphabet& a = model.direct[static_cast<std::size_t>(i)];
    const int s = env.sample_pmf(a.pmf);
    out.direct_state[static_cast<std::size_t>(i)] = s;
    out.direct[static_cast<std::size_t>(i)] = a.values[static_cast<std::size_t>(s)];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const GainAlphabet& a = model.cross_pair(i, j);
      out.cross[static_cast<std::size_t>(i) * n + j] =
          a.values[static_cast<std::size_t>(env.sample_pmf(a.pmf))];
    }
  }
}

GainRealization sample_slot(const FadingModel& model, RngStream& env, std::uint64_t slot) {
  GainRealization r;
  sample_slot_into(model, env, slot, r);
  return r;
}

double state_probability(const FadingModel& model, int user, int state) {
  if (user < 0 || user >= model.n_users) throw ValidationError("state_probability: user out of range");
  const GainAlphabet& a = model.direct[static_cast<std::size_t>(user)];
  if (state < 0 || state >= a.size()) throw ValidationError("state_probability: state out of range");
  return a.pmf[static_cast<std::size_t>(state)];
}

double cross_state_probability(const FadingModel& model, int rx, int tx, int state) {
  if (rx < 0 || rx >= model.n_users || tx < 0 || tx >= model.n_users || rx == tx) {
    throw ValidationError("cross_state_probability: pair out of range");
  }
  const GainAlphabet& a = model.cross_pair(rx, tx);
  if (state < 0 || state >= a.size()) {
    throw ValidationError("cross_state_probability: state out of range");
  }
  return a.pmf[static_cast<std::size_t>(state)];
}

}  // namespace powalloc
