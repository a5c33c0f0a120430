#pragma once

#include <cstdint>
#include <vector>

#include "selectsets/rule.hpp"

namespace selectsets {

// Exact (floating-point) distribution of L_n, evolved one observation at a
// time: a new arrival lands uniformly among n rank positions, so
//   P(L_n = j) = (r(j-1)/n) P(L_{n-1} = j-1) + (1 - r(j)/n) P(L_{n-1} = j).
class LDistribution {
 public:
  explicit LDistribution(RuleSpec rule);

  void advance();                      // n -> n+1
  void advance_to(std::uint64_t n);    // no-op if already past n

  std::uint64_t n() const noexcept { return n_; }
  const RuleSpec& rule() const noexcept { return rule_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double prob(std::uint64_t j) const {
    return j < probs_.size() ? probs_[j] : 0.0;
  }

  double total_mass() const;       // should be 1 up to rounding
  double mean() const;             // E L_n
  double second_moment() const;    // E L_n^2
  double mass_below(std::uint64_t k) const;  // P(L_n < k)

 private:
  RuleSpec rule_;
  std::vector<double> probs_;      // index j = retained count
  std::vector<double> cutoffs_;    // r(j) cache, grown with probs_
  std::uint64_t n_ = 0;
};

// Per-n row of the moment sweep. Percentile-only columns (t, d, u, e, and the
// recursion mean m_rec) are NaN for other rule kinds.
struct MomentRow {
  std::uint64_t n;
  double m;      // E L_n from the distribution
  double m_rec;  // E L_n from the mean recursion m' = m (1 + p/n) + d/n
  double t;      // m / n^p
  double d;      // E(ceil(p L_n) - p L_n)
  double u;      // E(L_n^2) / n^(2p)
  double e;      // m / (n+1)^p
  double eq;     // E Q_n
  bool neighbor_ok;  // neighbor-sum inequality held at this n (true if unchecked)
};

struct MomentSeries {
  RuleSpec rule;
  std::vector<MomentRow> rows;  // rows[i] holds n = i+1

  const MomentRow& at(std::uint64_t n) const { return rows.at(n - 1); }
};

// One pass of the DP from n = 1 to n_max recording every moment column.
// E(Q_n) comes from the one-step identity
//   E(Q_n) = ((n+1)/n) E(Q_{n-1}) + E[r(L_{n-1})(r(L_{n-1})+1)] / (2n),
// seeded at Q_0 = 0. For percentile rules the mean recursion
//   M_n = M_{n-1} (1 + p/n) + d_{n-1}/n
// runs alongside, seeded M_1 = 1 (the identity relies on r = ceil(p .) and so
// does not apply across the r(0) = 1 override at n = 1); the sweep throws
// std::runtime_error if the two mean paths drift apart beyond 1e-9 relative.
// The neighbor-sum inequality P(L=j+1) + P(L=j-1) >= P(L=j) is checked for
// all j at each 2 <= n <= neighbor_check_max (with -1e-12 slack); n = 1 is
// always a point mass and is reported ok without checking.
MomentSeries moment_series(const RuleSpec& rule, std::uint64_t n_max,
                           std::uint64_t neighbor_check_max = 0);

// E(ceil(p L_n) - p L_n) for the distribution's current n; the fractional
// gaps are computed in exact integer arithmetic before weighting.
// Throws std::invalid_argument for non-percentile rules.
double mean_ceil_gap(const LDistribution& dist);

// Neighbor-sum inequality at the distribution's current n.
struct NeighborCheck {
  bool ok;
  std::uint64_t first_bad_j;  // meaningful when !ok
  double worst_margin;        // min over j of lhs - rhs (>= -1e-12 when ok)
};
NeighborCheck check_neighbor_sum(const LDistribution& dist);

// Aggregate convergence verdicts for a percentile rule, computed from one
// moment sweep.
struct AsymptoticReport {
  RationalP p;
  std::uint64_t n_max = 0;
  bool t_bound_ok = true;       // T_n < 2/p for all n
  bool d_floor_ok = true;       // d_n >= eps_p / 3, eps_p = min(p, 1-p)/2
  bool e_monotone_ok = true;    // e_n nondecreasing (1e-9 slack)
  bool neighbor_all_ok = true;  // inequality held wherever checked
  std::uint64_t first_t_violation = 0;  // 0 when none
  std::uint64_t first_d_violation = 0;
  std::uint64_t first_e_violation = 0;
  double t_final = 0, u_final = 0, d_final = 0, e_final = 0;
  // Relative spread of T_n and U_n over the last decade [n_max/10, n_max]:
  // (max - min) / final. Small values indicate the normalized means have
  // flattened out.
  double t_last_decade_spread = 0;
  double u_last_decade_spread = 0;
  MomentSeries series;

  bool all_ok() const {
    return t_bound_ok && d_floor_ok && e_monotone_ok && neighbor_all_ok;
  }
};
AsymptoticReport asymptotic_report(const RationalP& p, std::uint64_t n_max,
                                   std::uint64_t neighbor_check_max);

}  // namespace selectsets
