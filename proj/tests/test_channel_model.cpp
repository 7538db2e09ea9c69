#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "powalloc/channel_model.hpp"
#include "powalloc/errors.hpp"

using namespace powalloc;

TEST_CASE("validate_model accepts the 3-user symmetric setup") {
  FadingModel m = testing::example1_model();
  CHECK_NOTHROW(validate_model(m));
}

TEST_CASE("validate_model rejects a pmf that does not sum to 1") {
  FadingModel m = testing::example1_model();
  m.direct[0].pmf = {0.5, 0.6};
  m.direct[0].values = {0.2, 0.6};
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("malformed-pmf"), ValidationError);
}

TEST_CASE("validate_model rejects a missing cross pair") {
  FadingModel m = testing::example1_model();
  m.cross_pair(1, 2) = GainAlphabet{};
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("missing cross pair"),
                       ValidationError);
}

TEST_CASE("validate_model rejects negative gains and duplicate values") {
  FadingModel m = testing::example1_model();
  m.direct[1].values = {-0.2, 0.6, 1.0};
  CHECK_THROWS_AS(validate_model(m), ValidationError);
  m = testing::example1_model();
  m.direct[1].values = {0.6, 0.6, 1.0};
  CHECK_THROWS_AS(validate_model(m), ValidationError);
}

TEST_CASE("degenerate pmf always yields its unit-mass value") {
  GainAlphabet a;
  a.values = {0.3, 0.9};
  a.pmf = {0.0, 1.0};
  FadingModel m = make_symmetric_model(2, a, testing::example_cross());
  validate_model(m);
  RngStream env(7);
  for (int t = 0; t < 200; ++t) {
    GainRealization r = sample_slot(m, env, static_cast<std::uint64_t>(t));
    for (int i = 0; i < 2; ++i) {
      CHECK(r.direct[static_cast<std::size_t>(i)] == 0.9);
      CHECK(r.direct_state[static_cast<std::size_t>(i)] == 1);
    }
  }
}

TEST_CASE("empirical direct-state frequencies match the pmf over 300k slots") {
  FadingModel m = testing::example1_model();
  RngStream env(42);
  const int slots = 300000;
  std::vector<std::vector<int>> counts(3, std::vector<int>(3, 0));
  GainRealization r;
  for (int t = 0; t < slots; ++t) {
    sample_slot_into(m, env, static_cast<std::uint64_t>(t), r);
    for (int i = 0; i < 3; ++i) ++counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(r.direct_state[static_cast<std::size_t>(i)])];
  }
  for (int i = 0; i < 3; ++i) {
    for (int s = 0; s < 3; ++s) {
      const double freq = counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] /
                          static_cast<double>(slots);
      CHECK(std::abs(freq - 1.0 / 3.0) < 0.005);
    }
  }
}

TEST_CASE("identical seeds reproduce identical realization sequences") {
  FadingModel m = testing::example1_model();
  RngStream a(123), b(123);
  for (int t = 0; t < 500; ++t) {
    GainRealization ra = sample_slot(m, a, static_cast<std::uint64_t>(t));
    GainRealization rb = sample_slot(m, b, static_cast<std::uint64_t>(t));
    CHECK(ra.direct == rb.direct);
    CHECK(ra.cross == rb.cross);
  }
}

TEST_CASE("distinct links are uncorrelated") {
  // Indicator of (direct state of user 0 == 0) vs (cross state of (1,0) == 0):
  // the empirical correlation of independent draws stays within the 3-sigma
  // band of a zero-mean product estimator.
  FadingModel m = testing::example1_model();
  RngStream env(99);
  const int slots = 100000;
  int c_a = 0, c_b = 0, c_ab = 0;
  GainRealization r;
  for (int t = 0; t < slots; ++t) {
    sample_slot_into(m, env, static_cast<std::uint64_t>(t), r);
    const bool a = r.direct_state[0] == 0;
    const bool b = r.cross_gain(1, 0, 3) == 0.1;
    c_a += a;
    c_b += b;
    c_ab += a && b;
  }
  const double pa = c_a / static_cast<double>(slots);
  const double pb = c_b / static_cast<double>(slots);
  const double pab = c_ab / static_cast<double>(slots);
  const double sigma = std::sqrt(pa * pb * (1 - pa * pb) / slots);
  CHECK(std::abs(pab - pa * pb) < 3 * sigma + 1e-12);
}

TEST_CASE("state_probability returns the configured pmf entries") {
  FadingModel m = testing::example1_model();
  CHECK(state_probability(m, 0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(state_probability(m, 2, 1) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(state_probability(m, 0, 5), ValidationError);
  CHECK_THROWS_AS(state_probability(m, 9, 0), ValidationError);

  // asymmetric per-receiver cross pmfs, as in the second numerical example
  FadingModel m2 = make_model_with_cross_pmfs(
      3, testing::example_direct(), {0.1, 0.3, 0.5},
      {{0.5, 0.3, 0.2}, {0.4, 0.5, 0.1}, {0.25, 0.5, 0.25}});
  validate_model(m2);
  CHECK(cross_state_probability(m2, 0, 1, 0) == doctest::Approx(0.5));
  CHECK(cross_state_probability(m2, 1, 0, 1) == doctest::Approx(0.5));
  CHECK(cross_state_probability(m2, 2, 0, 2) == doctest::Approx(0.25));

  GainAlphabet degenerate;
  degenerate.values = {1.0};
  degenerate.pmf = {1.0};
  FadingModel m3 = make_symmetric_model(1, degenerate, GainAlphabet{});
  CHECK(state_probability(m3, 0, 0) == 1.0);
}
