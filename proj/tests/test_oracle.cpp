#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "selectsets/exact.hpp"
#include "selectsets/oracle.hpp"

using namespace selectsets;

namespace {
const RuleSpec kMedian = RuleSpec::percentile(RationalP(1, 2));

std::uint64_t factorial(std::uint64_t n) {
  std::uint64_t f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}
}

TEST_CASE("exact rationals: arithmetic, normalization, guards") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -2) == Rational(-1, 2));
  CHECK(Rational(7, 3) * Rational(3, 7) == Rational(1));
  CHECK(Rational(1, 3) - Rational(2, 3) == Rational(-1, 3));
  CHECK((Rational(5, 8) / Rational(5, 2)) == Rational(1, 4));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0));
  CHECK(Rational(3, 4) <= Rational(3, 4));
  CHECK(Rational(1, 3).value() == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(Rational(-2, 6).str() == "-1/3");
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(INT64_MAX) + Rational(INT64_MAX), std::overflow_error);
  CHECK_THROWS_AS(Rational(INT64_MAX, 2) * Rational(INT64_MAX, 3),
                  std::overflow_error);
}

TEST_CASE("rank replay: worked median sequences") {
  {
    const std::array<std::uint64_t, 2> digits{1, 1};
    const RankReplay r = replay_ranks(kMedian, digits);
    CHECK(r.n == 2);
    CHECK(r.l == 2);
    CHECK(r.q == 3);
    CHECK(r.retained_ranks == std::vector<std::uint64_t>{1, 2});
  }
  {
    // Same relative story as the value stream 0.4, 0.7, 0.2.
    const std::array<std::uint64_t, 3> digits{1, 2, 1};
    const RankReplay r = replay_ranks(kMedian, digits);
    CHECK(r.n == 3);
    CHECK(r.l == 2);
    CHECK(r.q == 3);
    CHECK(r.retained_ranks == std::vector<std::uint64_t>{1, 2});
  }
  {
    const std::array<std::uint64_t, 2> bad{1, 3};  // rank 3 among 2 observations
    CHECK_THROWS_AS(replay_ranks(kMedian, bad), std::invalid_argument);
    const std::array<std::uint64_t, 1> zero{0};
    CHECK_THROWS_AS(replay_ranks(kMedian, zero), std::invalid_argument);
  }
}

TEST_CASE("the sequence visitor emits exactly n! sequences of valid digits") {
  for (std::uint64_t n = 1; n <= 6; ++n) {
    std::uint64_t count = 0;
    bool digits_ok = true;
    for_each_rank_sequence(n, [&](std::span<const std::uint64_t> digits) {
      ++count;
      for (std::size_t t = 0; t < digits.size(); ++t)
        if (digits[t] < 1 || digits[t] > t + 1) digits_ok = false;
    });
    CHECK(count == factorial(n));
    CHECK(digits_ok);
  }
}

TEST_CASE("enumeration: median at n = 3, exactly") {
  const ExactResult r = enumerate_exact(kMedian, 3);
  CHECK(r.dist.at(0) == Rational(0));
  CHECK(r.dist.at(1) == Rational(1, 3));
  CHECK(r.dist.at(2) == Rational(1, 2));
  CHECK(r.dist.at(3) == Rational(1, 6));
  CHECK(r.e_l == Rational(11, 6));
  CHECK(r.e_q == Rational(3));
}

TEST_CASE("enumeration: degenerate and closed-form cases") {
  for (const char* name : {"percentile:1/2", "percentile:1/1", "krecord:4"}) {
    const ExactResult r = enumerate_exact(RuleSpec::parse(name), 1);
    CHECK(r.e_l == Rational(1));
    CHECK(r.e_q == Rational(1));
    CHECK(r.e_a == Rational(1));
    CHECK(r.e_v == Rational(1));
  }

  // Full percentile: L_4 is uniform on 1..4 (the first observation's rank)
  // and the retained set is the top block, so Q = L(L+1)/2, A = (L+1)/2,
  // V = (L+1)/(2L).
  const ExactResult full = enumerate_exact(RuleSpec::percentile(RationalP(1, 1)), 4);
  for (std::uint64_t j = 1; j <= 4; ++j) CHECK(full.dist.at(j) == Rational(1, 4));
  CHECK(full.e_l == Rational(5, 2));
  CHECK(full.e_q == Rational(5));
  CHECK(full.e_a == Rational(7, 4));
  CHECK(full.e_v == Rational(73, 96));

  CHECK_THROWS_AS(enumerate_exact(kMedian, 10), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_exact(kMedian, 0), std::invalid_argument);
}

TEST_CASE("enumeration masses always sum to exactly one") {
  for (const char* name :
       {"percentile:1/3", "percentile:2/3", "krecord:2", "table:1,2,2"}) {
    const ExactResult r = enumerate_exact(RuleSpec::parse(name), 6);
    Rational total(0);
    for (const Rational& mass : r.dist) total += mass;
    CHECK(total == Rational(1));
  }
}

TEST_CASE("enumeration agrees with the distribution sweep at small n") {
  for (const char* name : {"percentile:1/3", "percentile:1/2", "percentile:2/3",
                           "percentile:1/1", "krecord:1", "krecord:3",
                           "table:1,2,2,3"}) {
    const RuleSpec rule = RuleSpec::parse(name);
    LDistribution dist(rule);
    const MomentSeries sweep = moment_series(rule, 6);
    for (std::uint64_t n = 1; n <= 6; ++n) {
      dist.advance();
      const ExactResult r = enumerate_exact(rule, n);
      for (std::uint64_t j = 0; j <= n; ++j)
        CHECK(std::abs(r.dist[j].value() - dist.prob(j)) <= 1e-12);
      CHECK(std::abs(r.e_l.value() - dist.mean()) <= 1e-12);
      CHECK(std::abs(r.e_q.value() - sweep.at(n).eq) <= 1e-9);
    }
  }
}

TEST_CASE("one-step conditional means: pinned examples") {
  {
    const std::array<std::uint64_t, 2> prefix{1, 1};
    const StepMeansReport rep = check_step_means(kMedian, prefix);
    CHECK(rep.ok);
    CHECK(rep.l_formula == Rational(7, 3));
    CHECK(rep.q_formula == Rational(13, 3));
    CHECK(rep.l_enum == rep.l_formula);
    CHECK(rep.q_enum == rep.q_formula);
    CHECK(rep.a_enum == rep.a_formula);
  }
  {
    const std::array<std::uint64_t, 1> prefix{1};
    const StepMeansReport median = check_step_means(kMedian, prefix);
    CHECK(median.ok);
    CHECK(median.l_formula == Rational(3, 2));  // r(1) = 1: kept half the time
    const StepMeansReport krec = check_step_means(RuleSpec::krecord(2), prefix);
    CHECK(krec.ok);
    CHECK(krec.l_formula == Rational(2));  // r(1) = 2: the next arrival is kept surely
  }
  CHECK_THROWS_AS(check_step_means(kMedian, std::span<const std::uint64_t>{}),
                  std::invalid_argument);
}

TEST_CASE("one-step conditional means hold on every reachable prefix") {
  for (const char* name :
       {"percentile:1/2", "percentile:3/4", "percentile:1/1", "krecord:2"}) {
    const RuleSpec rule = RuleSpec::parse(name);
    for (std::uint64_t len = 1; len <= 4; ++len) {
      for_each_rank_sequence(len, [&](std::span<const std::uint64_t> digits) {
        const StepMeansReport rep = check_step_means(rule, digits);
        CHECK(rep.ok);
      });
    }
  }
}

TEST_CASE("bump moments: worked median snapshot") {
  const std::array<std::uint64_t, 2> ranks{1, 3};
  const BumpMomentReport rep = check_bump_moments(kMedian, 4, ranks);
  CHECK(rep.mean_ok);
  CHECK(rep.second_ok);
  CHECK(rep.mean_enum == Rational(1, 2));
  CHECK(rep.mean_formula == Rational(1, 2));
  CHECK(rep.second_enum == Rational(1, 2));
  CHECK(rep.second_bound == Rational(3));
}

TEST_CASE("bump moments vanish when only the top block is retained") {
  const std::array<std::uint64_t, 1> ranks{1};
  const BumpMomentReport rep = check_bump_moments(RuleSpec::krecord(1), 5, ranks);
  CHECK(rep.mean_ok);
  CHECK(rep.mean_enum == Rational(0));
  CHECK(rep.second_enum == Rational(0));
}

TEST_CASE("bump moments reject inconsistent snapshots") {
  const std::array<std::uint64_t, 2> missing_top{2, 3};
  CHECK_THROWS_AS(check_bump_moments(kMedian, 4, missing_top), std::invalid_argument);
  const std::array<std::uint64_t, 2> unsorted{3, 1};
  CHECK_THROWS_AS(check_bump_moments(kMedian, 4, unsorted), std::invalid_argument);
  const std::array<std::uint64_t, 2> beyond{1, 9};
  CHECK_THROWS_AS(check_bump_moments(kMedian, 4, beyond), std::invalid_argument);
  // Cutoff exceeding n leaves no non-retention event to condition on.
  const std::array<std::uint64_t, 1> small_n{1};
  CHECK_THROWS_AS(check_bump_moments(RuleSpec::table({1, 5}), 3, small_n),
                  std::invalid_argument);
}

TEST_CASE("bump moments hold on every retained set replay can reach") {
  for (const char* name : {"percentile:1/2", "percentile:3/4", "krecord:2"}) {
    const RuleSpec rule = RuleSpec::parse(name);
    for (std::uint64_t len = 2; len <= 5; ++len) {
      for_each_rank_sequence(len, [&](std::span<const std::uint64_t> digits) {
        const RankReplay state = replay_ranks(rule, digits);
        if (rule.cutoff(state.l) > state.n) return;
        const BumpMomentReport rep =
            check_bump_moments(rule, state.n, state.retained_ranks);
        CHECK(rep.mean_ok);
        CHECK(rep.second_ok);
      });
    }
  }
}
