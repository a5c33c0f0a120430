#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selectsets/rational.hpp"
#include "selectsets/rule.hpp"

namespace selectsets {

// Everything in this module is exact: rank-insertion replay plus rational
// aggregation, no floating point and no sampling. It exists to pin down the
// other modules at small n, so it deliberately shares no code with them —
// decisions here are made in rank form (rank of the arrival among all
// observations so far vs the cutoff), whereas the stream engine thresholds
// against a retained value.

// State after replaying a rank-insertion sequence: digit t (1-based step) is
// the arrival's rank among the t observations seen so far, in 1..t.
struct RankReplay {
  std::uint64_t n = 0;
  std::uint64_t l = 0;
  std::uint64_t q = 0;
  // Ranks of the retained items among all n observations, ascending.
  std::vector<std::uint64_t> retained_ranks;
};

// Replays one sequence. Throws std::invalid_argument if a digit is out of range.
RankReplay replay_ranks(const RuleSpec& rule, std::span<const std::uint64_t> digits);

// Visits every rank-insertion sequence of length n (there are n! of them,
// one per relative ordering of the observations).
template <class F>
void for_each_rank_sequence(std::uint64_t n, F&& visit) {
  std::vector<std::uint64_t> digits(n, 1);
  for (;;) {
    visit(std::span<const std::uint64_t>(digits));
    std::size_t t = n;
    while (t > 0) {
      if (digits[t - 1] < t) {
        ++digits[t - 1];
        break;
      }
      digits[t - 1] = 1;
      --t;
    }
    if (t == 0) return;
  }
}

// Exact distribution and moments at small n, by full enumeration.
struct ExactResult {
  RuleSpec rule;
  std::uint64_t n;
  std::vector<Rational> dist;  // P(L_n = j), index 0..n
  Rational e_l, e_q, e_a, e_v;
};

// Pre: 1 <= n <= 9 (9! replays). Throws std::invalid_argument beyond that.
ExactResult enumerate_exact(const RuleSpec& rule, std::uint64_t n);

// One-step conditional-mean identities, checked exactly at the state reached
// by `prefix`: enumerate the n+1 equally likely ranks of the next arrival and
// compare the enumerated means of L', Q', A' against
//   E(L'|state) = L + r(L)/(n+1)
//   E(Q'|state) = (n+2)/(n+1) Q + r(L)(r(L)+1) / (2(n+1))
//   E(A'|state) = A (1 + (1 + L - r(L)) / ((n+1)(L+1))) + r(L)(r(L)-1) / (2(n+1)L)
struct StepMeansReport {
  bool ok = false;
  Rational l_enum, l_formula;
  Rational q_enum, q_formula;
  Rational a_enum, a_formula;
};
StepMeansReport check_step_means(const RuleSpec& rule,
                                 std::span<const std::uint64_t> prefix);

// Rank-sum increment A* contributed by a non-retained arrival: with j = r(L),
// an arrival landing at overall rank rho > j bumps every retained item whose
// rank is >= rho. Conditioned on non-retention (rho uniform on j+1..n+1),
//   E(A*)  = (Q - j(j+1)/2 - j(L-j)) / (n+1-j)        (exact)
//   E(A*^2) <= Q (2L - 2j + 1) / (n+1-j)              (bound)
// The snapshot must be consistent: retained ranks ascending, within 1..n,
// containing the full top block 1..j.
struct BumpMomentReport {
  bool mean_ok = false;
  bool second_ok = false;
  Rational mean_enum, mean_formula;
  Rational second_enum, second_bound;
};
BumpMomentReport check_bump_moments(const RuleSpec& rule, std::uint64_t n,
                                    std::span<const std::uint64_t> retained_ranks);

}  // namespace selectsets
