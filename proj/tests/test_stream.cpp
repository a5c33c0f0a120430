#include <doctest.h>

#include <algorithm>
#include <vector>

#include "selectsets/montecarlo.hpp"
#include "selectsets/rng.hpp"
#include "selectsets/stream.hpp"

using namespace selectsets;

namespace {
const RuleSpec kMedian = RuleSpec::percentile(RationalP(1, 2));
}

TEST_CASE("a fresh stream is empty and rejects statistics") {
  StreamState s(kMedian);
  CHECK(s.n() == 0);
  CHECK(s.l() == 0);
  CHECK(s.q() == 0);
  CHECK_THROWS_AS(s.stats(), std::logic_error);
}

TEST_CASE("the first observation is always retained") {
  for (const char* name : {"percentile:1/2", "percentile:1/1", "krecord:3", "table:1,2"}) {
    StreamState s(RuleSpec::parse(name));
    CHECK(s.step(0.42));
    CHECK(s.n() == 1);
    CHECK(s.l() == 1);
    CHECK(s.q() == 1);
  }
}

TEST_CASE("median rule keeps an arrival iff it beats the median threshold") {
  StreamState s(kMedian);
  CHECK(s.step(0.4));
  CHECK_FALSE(s.step(0.7));  // rank 2 among retained, cutoff is 1
  CHECK(s.q() == 1);         // 0.4 still rank 1 of {0.4, 0.7}
  CHECK(s.step(0.2));
  CHECK(s.l() == 2);
  CHECK(s.q() == 3);  // ranks 1 (0.2) and 2 (0.4) among three observations
  CHECK(s.retained_sorted() == std::vector<double>{0.2, 0.4});

  const StreamStats st = s.stats();
  CHECK(st.a == doctest::Approx(1.5));
  CHECK(st.v == doctest::Approx(0.75));
}

TEST_CASE("audit queries rank hypothetical arrivals and recount Q") {
  StreamState s(kMedian, /*audit=*/true);
  s.step(0.1);
  s.step(0.9);
  CHECK(s.rank_of_new(0.5) == 2);
  CHECK(s.rank_of_new(0.05) == 1);
  CHECK(s.rank_of_new(0.95) == 3);

  StreamState no_audit(kMedian);
  no_audit.step(0.1);
  CHECK_THROWS_AS(no_audit.rank_of_new(0.5), std::logic_error);
  CHECK_THROWS_AS(no_audit.recompute_q(), std::logic_error);
  CHECK_THROWS_AS(no_audit.top_block_retained(), std::logic_error);
}

TEST_CASE("a bare first observation recounts to Q = 1") {
  StreamState s(kMedian, true);
  s.step(0.8);
  CHECK(s.recompute_q() == 1);
}

TEST_CASE("the worked three-step trajectory recounts to Q = 3") {
  StreamState s(kMedian, true);
  s.step(0.4);
  s.step(0.7);
  s.step(0.2);
  CHECK(s.q() == 3);
  CHECK(s.recompute_q() == 3);
}

TEST_CASE("incremental Q matches a recount along a long fuzzed run") {
  for (const char* name : {"percentile:1/2", "percentile:9/10", "krecord:5"}) {
    StreamState s(RuleSpec::parse(name), true);
    Xoshiro256pp rng(1234);
    for (int i = 1; i <= 2000; ++i) {
      feed(s, rng);
      if (i % 97 == 0) CHECK(s.recompute_q() == s.q());
    }
    CHECK(s.recompute_q() == s.q());
    CHECK(s.decision_mismatches() == 0);
  }
}

TEST_CASE("full-percentile streams sit on their closed forms") {
  StreamState s(RuleSpec::percentile(RationalP(1, 1)));
  Xoshiro256pp rng(99);
  for (int i = 0; i < 1000; ++i) {
    feed(s, rng);
    const std::uint64_t l = s.l();
    CHECK(s.q() == l * (l + 1) / 2);  // retained items are exactly the l best
  }
  const StreamStats st = s.stats();
  CHECK(st.v == doctest::Approx((static_cast<double>(st.l) + 1.0) /
                                (2.0 * static_cast<double>(st.l))));
}

TEST_CASE("the cutoff exposed to the next arrival tracks the retained count") {
  StreamState s(RuleSpec::krecord(3));
  Xoshiro256pp rng(5);
  for (int i = 0; i < 50; ++i) {
    CHECK(s.next_cutoff() == std::min<std::uint64_t>(s.l() + 1, 3));
    feed(s, rng);
  }
}

TEST_CASE("the top block of observations stays retained for valid rules") {
  for (const char* name :
       {"percentile:1/10", "percentile:1/2", "percentile:1/1", "krecord:1", "krecord:5"}) {
    StreamState s(RuleSpec::parse(name), true);
    Xoshiro256pp rng(42);
    for (int i = 0; i < 300; ++i) {
      feed(s, rng);
      CHECK(s.top_block_retained());
    }
    CHECK(s.decision_mismatches() == 0);
  }
}

TEST_CASE("a subdiagonality-breaking table leaves a hole in the top block") {
  // r jumps 1 -> 3 once two items are retained: 0.9 was refused at cutoff 1,
  // but after 0.3 arrives the cutoff claims the best three belong in the set.
  StreamState s(RuleSpec::table({1, 1, 3}), true);
  s.step(0.5);
  s.step(0.9);
  s.step(0.3);
  CHECK(s.l() == 2);
  CHECK_FALSE(s.top_block_retained());
}

TEST_CASE("exhaustive small streams: table [1,3] never breaks the top block") {
  // Invalid by the axioms, yet it behaves as a keep-best-3 rule once L >= 1,
  // so no arrival order can strand a top-block observation.
  std::vector<double> values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::sort(values.begin(), values.end());
  bool violated_13 = false;
  bool violated_113 = false;
  do {
    StreamState a(RuleSpec::table({1, 3}), true);
    StreamState b(RuleSpec::table({1, 1, 3}), true);
    for (double v : values) {
      a.step(v);
      if (!a.top_block_retained()) violated_13 = true;
      b.step(v);
      if (!b.top_block_retained()) violated_113 = true;
    }
  } while (std::next_permutation(values.begin(), values.end()));
  CHECK_FALSE(violated_13);
  CHECK(violated_113);
}

TEST_CASE("duplicate observations are rejected") {
  StreamState audited(kMedian, true);
  audited.step(0.5);
  audited.step(0.9);  // not retained, but observed
  CHECK_THROWS_AS(audited.step(0.9), TieError);
  CHECK_THROWS_AS(audited.step(0.5), TieError);

  // Without the audit log only retained values are visible to the tie check.
  StreamState bare(kMedian);
  bare.step(0.5);
  bare.step(0.9);
  CHECK_THROWS_AS(bare.step(0.5), TieError);
}

TEST_CASE("retained counts never exceed observations and grow one at a time") {
  StreamState s(RuleSpec::percentile(RationalP(3, 4)), true);
  Xoshiro256pp rng(17);
  std::uint64_t prev_l = 0;
  for (int i = 1; i <= 1500; ++i) {
    feed(s, rng);
    CHECK(s.l() >= prev_l);
    CHECK(s.l() <= prev_l + 1);
    CHECK(s.l() <= s.n());
    CHECK(s.l() >= 1);
    prev_l = s.l();
  }
}
