#include "selectsets/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace selectsets {

namespace {

// In-place replay core shared by the enumeration loops: `ranks` holds the
// retained items' current overall ranks, ascending.
struct Replay {
  std::vector<std::uint64_t> ranks;
  std::uint64_t q = 0;
  std::uint64_t n = 0;

  void reset() {
    ranks.clear();
    q = 0;
    n = 0;
  }

  void step(const RuleSpec& rule, std::uint64_t rho) {
    const std::uint64_t len = ranks.size();
    const std::uint64_t j = rule.cutoff(len);
    // Bump every retained rank >= rho; count them for the Q update.
    std::uint64_t bumped = 0;
    for (auto it = ranks.rbegin(); it != ranks.rend() && *it >= rho; ++it) {
      ++*it;
      ++bumped;
    }
    if (rho <= j) {
      ranks.insert(ranks.end() - bumped, rho);
      q += rho + bumped;  // the new item's own rank, plus the bumps
    } else {
      q += bumped;
    }
    ++n;
  }
};

Rational mean_over(std::uint64_t count, const Rational& sum) {
  return sum / Rational(static_cast<std::int64_t>(count));
}

}  // namespace

RankReplay replay_ranks(const RuleSpec& rule, std::span<const std::uint64_t> digits) {
  Replay rp;
  for (std::size_t t = 0; t < digits.size(); ++t) {
    if (digits[t] < 1 || digits[t] > t + 1)
      throw std::invalid_argument("oracle: rank digit " + std::to_string(digits[t]) +
                                  " out of range at step " + std::to_string(t + 1));
    rp.step(rule, digits[t]);
  }
  return RankReplay{rp.n, rp.ranks.size(), rp.q, std::move(rp.ranks)};
}

ExactResult enumerate_exact(const RuleSpec& rule, std::uint64_t n) {
  if (n < 1 || n > 9)
    throw std::invalid_argument("oracle: enumeration supports 1 <= n <= 9, got " +
                                std::to_string(n));

  // Group permutations by the pair (L, Q): exact rational work then happens
  // on at most (n+1) * (n(n+1)/2 + 1) cells instead of n! sequences.
  const std::uint64_t q_max = n * (n + 1) / 2;
  std::vector<std::uint64_t> cells((n + 1) * (q_max + 1), 0);
  std::uint64_t total = 0;

  Replay rp;
  for_each_rank_sequence(n, [&](std::span<const std::uint64_t> digits) {
    rp.reset();
    for (std::size_t t = 0; t < digits.size(); ++t) rp.step(rule, digits[t]);
    ++cells[rp.ranks.size() * (q_max + 1) + rp.q];
    ++total;
  });

  ExactResult out{rule, n, {}, 0, 0, 0, 0};
  out.dist.assign(n + 1, Rational(0));
  for (std::uint64_t l = 0; l <= n; ++l) {
    std::uint64_t l_count = 0;
    for (std::uint64_t q = 0; q <= q_max; ++q) {
      const std::uint64_t c = cells[l * (q_max + 1) + q];
      if (c == 0) continue;
      l_count += c;
      const Rational weight(static_cast<std::int64_t>(c),
                            static_cast<std::int64_t>(total));
      out.e_q += weight * Rational(static_cast<std::int64_t>(q));
      if (l > 0) {
        const Rational a(static_cast<std::int64_t>(q), static_cast<std::int64_t>(l));
        out.e_a += weight * a;
        out.e_v += weight * a / Rational(static_cast<std::int64_t>(l));
      }
    }
    out.dist[l] = Rational(static_cast<std::int64_t>(l_count),
                           static_cast<std::int64_t>(total));
    out.e_l += out.dist[l] * Rational(static_cast<std::int64_t>(l));
  }
  return out;
}

StepMeansReport check_step_means(const RuleSpec& rule,
                                 std::span<const std::uint64_t> prefix) {
  if (prefix.empty())
    throw std::invalid_argument("oracle: step-mean check needs a nonempty prefix");
  const RankReplay state = replay_ranks(rule, prefix);
  const auto n = static_cast<std::int64_t>(state.n);
  const auto l = static_cast<std::int64_t>(state.l);
  const auto q = static_cast<std::int64_t>(state.q);
  const auto r = static_cast<std::int64_t>(rule.cutoff(state.l));

  // Enumerate the n+1 equally likely ranks of the next arrival.
  Rational l_sum(0), q_sum(0), a_sum(0);
  std::vector<std::uint64_t> digits(prefix.begin(), prefix.end());
  digits.push_back(0);
  for (std::uint64_t rho = 1; rho <= state.n + 1; ++rho) {
    digits.back() = rho;
    const RankReplay next = replay_ranks(rule, digits);
    l_sum += Rational(static_cast<std::int64_t>(next.l));
    q_sum += Rational(static_cast<std::int64_t>(next.q));
    a_sum += Rational(static_cast<std::int64_t>(next.q),
                      static_cast<std::int64_t>(next.l));
  }

  StepMeansReport rep;
  rep.l_enum = mean_over(state.n + 1, l_sum);
  rep.q_enum = mean_over(state.n + 1, q_sum);
  rep.a_enum = mean_over(state.n + 1, a_sum);

  rep.l_formula = Rational(l) + Rational(r, n + 1);
  rep.q_formula = Rational(n + 2, n + 1) * Rational(q) +
                  Rational(r * (r + 1), 2 * (n + 1));
  const Rational a(q, l);
  rep.a_formula = a * (Rational(1) + Rational(1 + l - r, (n + 1) * (l + 1))) +
                  Rational(r * (r - 1), 2 * (n + 1) * l);

  rep.ok = rep.l_enum == rep.l_formula && rep.q_enum == rep.q_formula &&
           rep.a_enum == rep.a_formula;
  return rep;
}

BumpMomentReport check_bump_moments(const RuleSpec& rule, std::uint64_t n,
                                    std::span<const std::uint64_t> retained_ranks) {
  const std::uint64_t l = retained_ranks.size();
  const std::uint64_t j = rule.cutoff(l);
  if (j > n)
    throw std::invalid_argument(
        "oracle: no non-retention event exists (cutoff exceeds n)");

  // Consistency: ascending, within 1..n, and the full top block 1..j present.
  std::uint64_t q = 0;
  for (std::size_t i = 0; i < retained_ranks.size(); ++i) {
    const std::uint64_t rank = retained_ranks[i];
    if (rank < 1 || rank > n)
      throw std::invalid_argument("oracle: retained rank out of range");
    if (i > 0 && retained_ranks[i - 1] >= rank)
      throw std::invalid_argument("oracle: retained ranks must be ascending");
    if (i < j && rank != i + 1)
      throw std::invalid_argument(
          "oracle: snapshot misses part of the top block 1..j");
    q += rank;
  }
  if (l < j)
    throw std::invalid_argument("oracle: snapshot misses part of the top block 1..j");

  // A*(rho) = number of retained items beyond the top block with rank >= rho,
  // for rho uniform on j+1 .. n+1.
  const std::uint64_t outcomes = n + 1 - j;
  Rational sum(0), sum_sq(0);
  for (std::uint64_t rho = j + 1; rho <= n + 1; ++rho) {
    std::uint64_t bumped = 0;
    for (std::size_t i = j; i < retained_ranks.size(); ++i)
      if (retained_ranks[i] >= rho) ++bumped;
    const Rational b(static_cast<std::int64_t>(bumped));
    sum += b;
    sum_sq += b * b;
  }

  BumpMomentReport rep;
  rep.mean_enum = mean_over(outcomes, sum);
  rep.second_enum = mean_over(outcomes, sum_sq);

  const auto ni = static_cast<std::int64_t>(n);
  const auto li = static_cast<std::int64_t>(l);
  const auto ji = static_cast<std::int64_t>(j);
  const auto qi = static_cast<std::int64_t>(q);
  rep.mean_formula =
      Rational(qi - ji * (ji + 1) / 2 - ji * (li - ji), ni + 1 - ji);
  rep.second_bound = Rational(qi * (2 * li - 2 * ji + 1), ni + 1 - ji);

  rep.mean_ok = rep.mean_enum == rep.mean_formula;
  rep.second_ok = rep.second_enum <= rep.second_bound;
  return rep;
}

}  // namespace selectsets
