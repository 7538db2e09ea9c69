#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "powalloc/action_space.hpp"
#include "powalloc/errors.hpp"

using namespace powalloc;

namespace {

// Independent exhaustive filter: every tuple over the level grid, kept iff
// the average-power constraint holds.
std::set<std::vector<double>> brute_force_feasible(const std::vector<double>& levels,
                                                   const std::vector<double>& pmf,
                                                   double budget) {
  std::set<std::vector<double>> out;
  const int n = static_cast<int>(pmf.size());
  const int m = static_cast<int>(levels.size());
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> powers(static_cast<std::size_t>(n));
    double avg = 0.0;
    for (int s = 0; s < n; ++s) {
      powers[static_cast<std::size_t>(s)] = levels[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
      avg += pmf[static_cast<std::size_t>(s)] * powers[static_cast<std::size_t>(s)];
    }
    if (avg <= budget + kBudgetTolerance) out.insert(powers);
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

TEST_CASE("enumeration matches the exhaustive budget filter at 5 dB") {
  const GainAlphabet direct = testing::example_direct();
  const std::vector<double> levels = testing::example_levels();
  const double budget = snr_db_to_budget(5.0);  // ~3.162

  const auto expected = brute_force_feasible(levels, direct.pmf, budget);
  CHECK(expected.size() == 4);  // all-zero plus the three single-5 tuples

  PolicySet set = enumerate_policies(direct, levels, budget, 0.75);
  CHECK(set.size() == 4);
  std::set<std::vector<double>> got;
  for (int k = 0; k < set.size(); ++k) got.insert(set[k].powers);
  CHECK(got == expected);
}

TEST_CASE("every tuple is feasible at 15 dB") {
  const GainAlphabet direct = testing::example_direct();
  const std::vector<double> levels = testing::example_levels();
  const double budget = snr_db_to_budget(15.0);  // ~31.62, above the max average 30
  const auto expected = brute_force_feasible(levels, direct.pmf, budget);
  CHECK(expected.size() == 343);
  PolicySet set = enumerate_policies(direct, levels, budget, 0.75);
  CHECK(set.size() == 343);
}

TEST_CASE("infeasible budget is an error") {
  const std::vector<double> levels = {5.0};
  CHECK_THROWS_WITH_AS(
      enumerate_policies(testing::example_direct(), levels, 0.0, 0.75),
      doctest::Contains("empty-result"), ValidationError);
}

TEST_CASE("enumeration order is lexicographic and deterministic") {
  const GainAlphabet direct = testing::example_direct();
  const std::vector<double> levels = testing::example_levels();
  PolicySet a = enumerate_policies(direct, levels, snr_db_to_budget(15.0), 0.75);
  PolicySet b = enumerate_policies(direct, levels, snr_db_to_budget(15.0), 0.75);
  REQUIRE(a.size() == b.size());
  for (int k = 0; k < a.size(); ++k) CHECK(a[k].powers == b[k].powers);
  // lexicographic over level indices, first state most significant
  CHECK(a[0].powers == std::vector<double>{0, 0, 0});
  CHECK(a[1].powers == std::vector<double>{0, 0, 5});
  CHECK(a[7].powers == std::vector<double>{0, 5, 0});
}

TEST_CASE("multi-rate cardinality is |rates| x |tuples|") {
  const GainAlphabet direct = testing::example_direct();
  const std::vector<double> levels = testing::example_levels();
  const std::vector<double> rates = {0.75, 0.9, 1.2};

  PolicySet multi = enumerate_multirate(direct, levels, snr_db_to_budget(15.0), rates);
  CHECK(multi.size() == 3 * 343);  // 1029
  CHECK(multi.multirate());

  PolicySet small = enumerate_multirate(direct, levels, snr_db_to_budget(5.0),
                                        std::vector<double>{0.75, 0.9});
  CHECK(small.size() == 2 * 4);

  PolicySet single = enumerate_multirate(direct, levels, snr_db_to_budget(5.0),
                                         std::vector<double>{0.9});
  PolicySet fixed = enumerate_policies(direct, levels, snr_db_to_budget(5.0), 0.9);
  REQUIRE(single.size() == fixed.size());
  for (int k = 0; k < single.size(); ++k) {
    CHECK(single[k].powers == fixed[k].powers);
    CHECK(single[k].rate == fixed[k].rate);
  }
  CHECK_FALSE(single.multirate());
}

TEST_CASE("threshold formula matches hand evaluation") {
  // gamma = |h|^2 p / (2^r - 1) - 1, hand-evaluated: 2^0.75 - 1 ~= 0.681793
  const double denom = std::pow(2.0, 0.75) - 1.0;
  CHECK(denom == doctest::Approx(0.6817928305).epsilon(1e-9));

  const double g1 = 30.0 / denom - 1.0;
  CHECK(g1 == doctest::Approx(43.0).epsilon(2e-3));
  CHECK(interference_threshold(30.0, 1.0, 0.75) == doctest::Approx(g1).epsilon(1e-12));

  CHECK(interference_threshold(0.0, 1.0, 0.75) == -1.0);
  CHECK(interference_threshold(0.0, 0.2, 1.2) == -1.0);

  const double g2 = 0.04 * 5.0 / denom - 1.0;
  CHECK(g2 == doctest::Approx(-0.7067).epsilon(1e-3));
  CHECK(interference_threshold(5.0, 0.2, 0.75) == doctest::Approx(g2).epsilon(1e-12));
}

TEST_CASE("threshold is monotone in power and gain, antitone in rate") {
  const std::vector<double> gains = {0.2, 0.6, 1.0};
  const std::vector<double> powers = {5, 10, 20, 30};
  const std::vector<double> rates = {0.5, 0.75, 0.9, 1.2};
  for (double h : gains) {
    for (double r : rates) {
      for (std::size_t i = 0; i + 1 < powers.size(); ++i) {
        CHECK(interference_threshold(powers[i + 1], h, r) >
              interference_threshold(powers[i], h, r));
      }
    }
  }
  for (double p : powers) {
    for (double r : rates) {
      for (std::size_t i = 0; i + 1 < gains.size(); ++i) {
        CHECK(interference_threshold(p, gains[i + 1], r) >
              interference_threshold(p, gains[i], r));
      }
    }
    for (double h : gains) {
      for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
        CHECK(interference_threshold(p, h, rates[i + 1]) <
              interference_threshold(p, h, rates[i]));
      }
    }
  }
}

TEST_CASE("policy-set thresholds agree with the free function") {
  const GainAlphabet direct = testing::example_direct();
  PolicySet set = enumerate_policies(direct, testing::example_levels(), snr_db_to_budget(10.0),
                                     0.75);
  for (int k = 0; k < set.size(); k += 7) {
    for (int s = 0; s < 3; ++s) {
      CHECK(set.threshold(k, s) ==
            interference_threshold(set[k].powers[static_cast<std::size_t>(s)],
                                   direct.values[static_cast<std::size_t>(s)], 0.75));
    }
  }
  CHECK(interference_threshold(set[0], direct, 0.6) == set.threshold(0, 1));
}

TEST_CASE("budget holds for every enumerated policy and fails for the rest") {
  const GainAlphabet direct = testing::example_direct();
  const std::vector<double> levels = testing::example_levels();
  const double budget = snr_db_to_budget(10.0);  // 10
  PolicySet set = enumerate_policies(direct, levels, budget, 0.75);
  std::set<std::vector<double>> enumerated;
  for (int k = 0; k < set.size(); ++k) {
    CHECK(average_power(set[k].powers, direct.pmf) <= budget + kBudgetTolerance);
    enumerated.insert(set[k].powers);
  }
  const auto all = brute_force_feasible(levels, direct.pmf, 1e9);  // every tuple
  CHECK(all.size() == 343);
  for (const auto& powers : all) {
    if (!enumerated.contains(powers)) {
      CHECK(average_power(powers, direct.pmf) > budget + kBudgetTolerance);
    }
  }
}
