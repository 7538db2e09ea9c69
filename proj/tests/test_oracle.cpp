#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "powalloc/errors.hpp"
#include "powalloc/oracle.hpp"

using namespace powalloc;

namespace {

// Test-side enumeration of u_i, written as plain nested loops over every
// joint channel state; deliberately structured differently from the library.
double reference_utility(const FadingModel& m, const std::vector<PolicySet>& sets,
                         const ActionProfile& profile, int user) {
  const int n = m.n_users;
  std::vector<int> dstate(static_cast<std::size_t>(n), 0);
  std::vector<int> cstate(static_cast<std::size_t>(n), 0);  // cross state into `user` from j
  double total = 0.0;

  auto loop_cross = [&](auto&& self, int j, double prob, double interference) -> void {
    while (j == user) ++j;
    if (j >= n) {
      const int own = dstate[static_cast<std::size_t>(user)];
      const double gamma = sets[static_cast<std::size_t>(user)].threshold(
          profile.k[static_cast<std::size_t>(user)], own);
      if (interference <= gamma) total += prob;
      return;
    }
    const GainAlphabet& cr = m.cross_pair(user, j);
    const double power = sets[static_cast<std::size_t>(j)][profile.k[static_cast<std::size_t>(j)]]
                             .powers[static_cast<std::size_t>(dstate[static_cast<std::size_t>(j)])];
    for (int c = 0; c < cr.size(); ++c) {
      const double g = cr.values[static_cast<std::size_t>(c)];
      self(self, j + 1, prob * cr.pmf[static_cast<std::size_t>(c)], interference + g * g * power);
    }
  };
  auto loop_direct = [&](auto&& self, int j, double prob) -> void {
    if (j >= n) {
      loop_cross(loop_cross, 0, prob, 0.0);
      return;
    }
    const GainAlphabet& d = m.direct[static_cast<std::size_t>(j)];
    for (int s = 0; s < d.size(); ++s) {
      dstate[static_cast<std::size_t>(j)] = s;
      self(self, j + 1, prob * d.pmf[static_cast<std::size_t>(s)]);
    }
  };
  loop_direct(loop_direct, 0, 1.0);
  (void)cstate;
  return total;
}

}  // namespace

TEST_CASE("exact utility: lone user with nonnegative thresholds gets 1, all-zero gets 0") {
  const GainAlphabet direct = uniform_alphabet({0.6, 1.0});
  FadingModel solo = make_symmetric_model(1, direct, GainAlphabet{});
  std::vector<PolicySet> sets;
  sets.push_back(PolicySet(0, {PowerPolicy{{12.0, 12.0}, 0.75}, PowerPolicy{{0.0, 0.0}, 0.75}},
                           direct));
  CHECK(exact_utility(solo, sets, ActionProfile{{0}})[0] == doctest::Approx(1.0));
  CHECK(exact_utility(solo, sets, ActionProfile{{1}})[0] == 0.0);

  FadingModel m2 = testing::small2_model();
  std::vector<PolicySet> zsets;
  for (int i = 0; i < 2; ++i) {
    zsets.push_back(PolicySet(i, {PowerPolicy{{0.0, 0.0}, 0.75}}, direct));
  }
  const std::vector<double> u = exact_utility(m2, zsets, ActionProfile{{0, 0}});
  CHECK(u[0] == 0.0);
  CHECK(u[1] == 0.0);
}

TEST_CASE("exact utility: degenerate two-user instance evaluates by hand") {
  // Single joint state: gamma = 20/0.681793 - 1 ~= 28.33, interference =
  // 0.25*20 = 5 <= gamma, so both users succeed always.
  GainAlphabet direct;
  direct.values = {1.0};
  direct.pmf = {1.0};
  GainAlphabet cross;
  cross.values = {0.5};
  cross.pmf = {1.0};
  FadingModel m = make_symmetric_model(2, direct, cross);
  std::vector<PolicySet> sets;
  for (int i = 0; i < 2; ++i) {
    sets.push_back(PolicySet(i, {PowerPolicy{{20.0}, 0.75}}, direct));
  }
  const double gamma = 20.0 / (std::pow(2.0, 0.75) - 1.0) - 1.0;
  CHECK(gamma == doctest::Approx(28.33).epsilon(1e-3));
  const std::vector<double> u = exact_utility(m, sets, ActionProfile{{0, 0}});
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(1.0));
}

TEST_CASE("exact utility agrees with an independent enumeration on the small instance") {
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ExactUtilityOracle oracle(m, sets);
  for (int a = 0; a < sets[0].size(); ++a) {
    for (int b = 0; b < sets[1].size(); ++b) {
      ActionProfile p{{a, b}};
      for (int i = 0; i < 2; ++i) {
        CHECK(oracle.utility(i, p) ==
              doctest::Approx(reference_utility(m, sets, p, i)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("oracle rejects instances beyond its guards") {
  // 6 users with 8-value alphabets: per-user joint-state enumeration blows
  // past the guard without ever being evaluated.
  std::vector<double> values;
  for (int v = 0; v < 8; ++v) values.push_back(0.1 * (v + 1));
  FadingModel big = make_symmetric_model(6, uniform_alphabet(values), uniform_alphabet(values));
  std::vector<PolicySet> sets;
  const GainAlphabet direct = uniform_alphabet(values);
  for (int i = 0; i < 6; ++i) {
    sets.push_back(PolicySet(i, {PowerPolicy{std::vector<double>(8, 10.0), 0.75}}, direct));
  }
  CHECK_THROWS_AS(exact_utility(big, sets, ActionProfile{{0, 0, 0, 0, 0, 0}}),
                  InstanceTooLargeError);
}

TEST_CASE("point mass on a pure nash equilibrium passes the CE check at eps 0") {
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ExactUtilityOracle oracle(m, sets);

  // exhaustive best-response scan for a pure NE
  ActionProfile ne;
  bool found = false;
  for (int a = 0; a < sets[0].size() && !found; ++a) {
    for (int b = 0; b < sets[1].size() && !found; ++b) {
      ActionProfile p{{a, b}};
      bool stable = true;
      for (int i = 0; i < 2 && stable; ++i) {
        const double base = oracle.utility(i, p);
        for (int alt = 0; alt < sets[static_cast<std::size_t>(i)].size(); ++alt) {
          ActionProfile q = p;
          q.k[static_cast<std::size_t>(i)] = alt;
          if (oracle.utility(i, q) > base + 1e-12) {
            stable = false;
            break;
          }
        }
      }
      if (stable) {
        ne = p;
        found = true;
      }
    }
  }
  REQUIRE(found);

  SparseDistribution point;
  point.prob[ne.k] = 1.0;
  EquilibriumCheck ce = is_epsilon_ce(point, m, sets, 0.0);
  CHECK(ce.pass);
  CHECK(ce.max_violation <= 1e-9);
  // CE implies CCE at the same epsilon
  EquilibriumCheck cce = is_epsilon_cce(point, m, sets, 0.0);
  CHECK(cce.pass);
}

TEST_CASE("point mass with a strictly better reply fails by exactly the gap") {
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ExactUtilityOracle oracle(m, sets);

  // find a profile where user 0 has a strictly better reply, and the gap
  ActionProfile profile;
  double gap = -1.0;
  int best_alt = -1;
  for (int a = 0; a < sets[0].size(); ++a) {
    for (int b = 0; b < sets[1].size(); ++b) {
      ActionProfile p{{a, b}};
      const double base = oracle.utility(0, p);
      for (int alt = 0; alt < sets[0].size(); ++alt) {
        ActionProfile q = p;
        q.k[0] = alt;
        const double g = oracle.utility(0, q) - base;
        if (g > gap) {
          gap = g;
          profile = p;
          best_alt = alt;
        }
      }
    }
  }
  REQUIRE(gap > 0.01);

  SparseDistribution point;
  point.prob[profile.k] = 1.0;
  EquilibriumCheck ce = is_epsilon_ce(point, m, sets, gap - 0.005);
  CHECK_FALSE(ce.pass);
  CHECK(ce.max_violation == doctest::Approx(gap).epsilon(1e-9));
  CHECK(ce.witness_deviation == best_alt);
  EquilibriumCheck loose = is_epsilon_ce(point, m, sets, gap + 0.005);
  CHECK(loose.pass);
}

TEST_CASE("N=1 distributions supported on argmax actions pass trivially") {
  const GainAlphabet direct = uniform_alphabet({0.6, 1.0});
  FadingModel solo = make_symmetric_model(1, direct, GainAlphabet{});
  std::vector<PolicySet> sets = {
      PolicySet(0,
                {PowerPolicy{{12.0, 12.0}, 0.75}, PowerPolicy{{0.0, 12.0}, 0.75},
                 PowerPolicy{{0.0, 0.0}, 0.75}},
                direct)};
  SparseDistribution point;
  point.prob[std::vector<int>{0}] = 1.0;
  CHECK(is_epsilon_ce(point, solo, sets, 0.0).pass);
  CHECK(is_epsilon_cce(point, solo, sets, 0.0).pass);
}

TEST_CASE("uniform play against a dominant action fails the CCE check by the mean gap") {
  // user 0 has a dominant action; uniform joint distribution leaves exactly
  // the average dominance gap as the violation
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ExactUtilityOracle oracle(m, sets);
  SparseDistribution uniform;
  const double w = 1.0 / (6.0 * 6.0);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) uniform.prob[std::vector<int>{a, b}] = w;
  }
  // reference: best unconditional deviation gain for each user
  double expected = -1e9;
  for (int i = 0; i < 2; ++i) {
    for (int alt = 0; alt < 6; ++alt) {
      double gain = 0.0;
      for (const auto& [prof, p] : uniform.prob) {
        ActionProfile base{prof};
        ActionProfile swapped{prof};
        swapped.k[static_cast<std::size_t>(i)] = alt;
        gain += p * (oracle.utility(i, swapped) - oracle.utility(i, base));
      }
      expected = std::max(expected, gain);
    }
  }
  REQUIRE(expected > 0.01);  // the instance has meaningful incentives
  EquilibriumCheck cce = is_epsilon_cce(uniform, m, sets, 0.0);
  CHECK_FALSE(cce.pass);
  CHECK(cce.max_violation == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("brute-force pareto matches the test-side scan and is scale invariant") {
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ExactUtilityOracle oracle(m, sets);

  double best = -1e9;
  ActionProfile arg;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      ActionProfile p{{a, b}};
      const double w = 0.75 * oracle.utility(0, p) + 0.75 * oracle.utility(1, p);
      if (w > best) {
        best = w;
        arg = p;
      }
    }
  }
  const std::vector<double> alphas = {0.75, 0.75};
  ParetoOptimum got = brute_force_pareto(m, sets, alphas);
  CHECK(got.score == doctest::Approx(best).epsilon(1e-12));
  CHECK(got.profile.k == arg.k);

  const std::vector<double> scaled = {7.5, 7.5};
  ParetoOptimum scaled_got = brute_force_pareto(m, sets, scaled);
  CHECK(scaled_got.profile.k == got.profile.k);
  CHECK(scaled_got.score == doctest::Approx(10.0 * got.score).epsilon(1e-9));

  // no enumerated profile weakly dominates the argmax with a strict improvement
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      ActionProfile p{{a, b}};
      const double u0 = oracle.utility(0, p), u1 = oracle.utility(1, p);
      const bool dominates = u0 >= got.utilities[0] - 1e-12 && u1 >= got.utilities[1] - 1e-12 &&
                             (u0 > got.utilities[0] + 1e-9 || u1 > got.utilities[1] + 1e-9);
      CHECK_FALSE(dominates);
    }
  }
}

TEST_CASE("brute-force pareto with a single user is the utility argmax") {
  const GainAlphabet direct = uniform_alphabet({0.6, 1.0});
  FadingModel solo = make_symmetric_model(1, direct, GainAlphabet{});
  std::vector<PolicySet> sets = {
      PolicySet(0,
                {PowerPolicy{{0.0, 0.0}, 0.75}, PowerPolicy{{0.0, 12.0}, 0.75},
                 PowerPolicy{{12.0, 12.0}, 0.75}},
                direct)};
  ParetoOptimum got = brute_force_pareto(solo, sets, std::vector<double>{1.0});
  CHECK(got.profile.k == std::vector<int>{2});
  CHECK(got.score == doctest::Approx(1.0));
}

TEST_CASE("brute-force nash bargaining honors the disagreement point") {
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ExactUtilityOracle oracle(m, sets);

  // d = 0 reduces to maximizing the plain product
  double best = -1.0;
  ActionProfile arg;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      ActionProfile p{{a, b}};
      const double prod = oracle.utility(0, p) * oracle.utility(1, p);
      if (prod > best) {
        best = prod;
        arg = p;
      }
    }
  }
  ActionProfile dis{{0, 0}};
  NashOptimum nb = brute_force_nb(m, sets, std::vector<double>{0.0, 0.0}, dis);
  CHECK(nb.product == doctest::Approx(best).epsilon(1e-12));
  CHECK(nb.profile.k == arg.k);
  CHECK(nb.utilities[0] >= 0.0);

  // d above everything achievable -> degenerate outcome
  NashOptimum none = brute_force_nb(m, sets, std::vector<double>{2.0, 2.0}, dis);
  CHECK(none.product == 0.0);
  CHECK(none.profile.k == dis.k);
}

TEST_CASE("nash argmax can differ from the weighted-sum argmax") {
  // With a near-zero weight on user 1, the weighted sum is maximized by
  // silencing user 1 outright, while the product needs both utilities
  // strictly positive. Existence is checked by enumeration, not assumed.
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  ParetoOptimum pareto = brute_force_pareto(m, sets, std::vector<double>{1.0, 0.01});
  NashOptimum nb = brute_force_nb(m, sets, std::vector<double>{0.0, 0.0}, ActionProfile{{0, 0}});
  REQUIRE(nb.product > 0.0);
  CHECK(nb.utilities[0] > 0.0);
  CHECK(nb.utilities[1] > 0.0);
  CHECK(pareto.profile.k != nb.profile.k);
}

TEST_CASE("oracle outputs are deterministic") {
  FadingModel m = testing::small2_model();
  std::vector<PolicySet> sets = testing::small2_sets();
  const std::vector<double> alphas = {0.75, 0.75};
  ParetoOptimum a = brute_force_pareto(m, sets, alphas);
  ParetoOptimum b = brute_force_pareto(m, sets, alphas);
  CHECK(a.profile.k == b.profile.k);
  CHECK(a.score == b.score);
  CHECK(exact_utility(m, sets, a.profile) == exact_utility(m, sets, a.profile));
}
