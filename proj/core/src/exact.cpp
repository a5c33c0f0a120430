#include "selectsets/exact.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selectsets {

LDistribution::LDistribution(RuleSpec rule) : rule_(std::move(rule)) {
  probs_.push_back(1.0);  // L_0 = 0 with certainty
  cutoffs_.push_back(static_cast<double>(rule_.cutoff(0)));
}

void LDistribution::advance() {
  const std::uint64_t n = n_ + 1;
  probs_.push_back(0.0);
  cutoffs_.push_back(static_cast<double>(rule_.cutoff(probs_.size() - 1)));
  const double inv_n = 1.0 / static_cast<double>(n);
  // In place, descending j: probs_[j-1] still holds the previous step's value
  // when row j is written.
  for (std::size_t j = probs_.size() - 1; j >= 1; --j) {
    probs_[j] = probs_[j - 1] * (cutoffs_[j - 1] * inv_n) +
                probs_[j] * (1.0 - cutoffs_[j] * inv_n);
  }
  probs_[0] *= 1.0 - cutoffs_[0] * inv_n;
  n_ = n;
}

void LDistribution::advance_to(std::uint64_t n) {
  while (n_ < n) advance();
}

double LDistribution::total_mass() const {
  double s = 0.0;
  for (double v : probs_) s += v;
  return s;
}

double LDistribution::mean() const {
  double s = 0.0;
  for (std::size_t j = 1; j < probs_.size(); ++j)
    s += static_cast<double>(j) * probs_[j];
  return s;
}

double LDistribution::second_moment() const {
  double s = 0.0;
  for (std::size_t j = 1; j < probs_.size(); ++j)
    s += static_cast<double>(j) * static_cast<double>(j) * probs_[j];
  return s;
}

double LDistribution::mass_below(std::uint64_t k) const {
  double s = 0.0;
  for (std::size_t j = 0; j < probs_.size() && j < k; ++j) s += probs_[j];
  return s;
}

double mean_ceil_gap(const LDistribution& dist) {
  if (dist.rule().kind() != RuleKind::percentile)
    throw std::invalid_argument(
        "exact: ceiling-gap mean is defined for percentile rules only");
  const RationalP& p = dist.rule().p();
  const double inv_den = 1.0 / static_cast<double>(p.den());
  double s = 0.0;
  const auto& probs = dist.probs();
  for (std::size_t j = 1; j < probs.size(); ++j)
    s += probs[j] * (static_cast<double>(ceil_gap_num(p, j)) * inv_den);
  return s;
}

NeighborCheck check_neighbor_sum(const LDistribution& dist) {
  constexpr double kSlack = -1e-12;
  const auto& probs = dist.probs();
  NeighborCheck out{true, 0, 1.0};
  for (std::size_t j = 1; j < probs.size(); ++j) {
    const double above = j + 1 < probs.size() ? probs[j + 1] : 0.0;
    const double margin = above + probs[j - 1] - probs[j];
    if (margin < out.worst_margin) out.worst_margin = margin;
    if (margin < kSlack && out.ok) {
      out.ok = false;
      out.first_bad_j = j;
    }
  }
  return out;
}

MomentSeries moment_series(const RuleSpec& rule, std::uint64_t n_max,
                           std::uint64_t neighbor_check_max) {
  const bool pct = rule.kind() == RuleKind::percentile;
  const double p = pct ? rule.p().value() : 0.0;
  const double nan = std::nan("");

  LDistribution dist(rule);
  MomentSeries series{rule, {}};
  series.rows.reserve(n_max);

  double eq = 0.0;     // E Q_{n-1}, advanced alongside the distribution
  double m_rec = nan;  // mean-recursion path, percentile only
  double d_prev = nan;

  for (std::uint64_t n = 1; n <= n_max; ++n) {
    // Transition terms need the distribution at n-1.
    double r_pair = 0.0;  // E[ r(L)(r(L)+1) ] at n-1
    {
      const auto& probs = dist.probs();
      for (std::size_t j = 0; j < probs.size(); ++j) {
        const double r = static_cast<double>(rule.cutoff(j));
        r_pair += probs[j] * r * (r + 1.0);
      }
    }
    eq = eq * (static_cast<double>(n + 1) / static_cast<double>(n)) +
         r_pair / (2.0 * static_cast<double>(n));

    if (pct) {
      if (n == 1)
        m_rec = 1.0;  // the recursion's r = ceil(p.) premise fails across n = 1
      else
        m_rec = m_rec * (1.0 + p / static_cast<double>(n)) +
                d_prev / static_cast<double>(n);
    }

    dist.advance();

    MomentRow row;
    row.n = n;
    row.m = dist.mean();
    row.eq = eq;
    row.neighbor_ok = true;
    // n = 1 is skipped: L_1 = 1 surely, and a point mass breaks the sum at its atom.
    if (n >= 2 && n <= neighbor_check_max)
      row.neighbor_ok = check_neighbor_sum(dist).ok;
    if (pct) {
      row.m_rec = m_rec;
      row.d = mean_ceil_gap(dist);
      const double np = std::pow(static_cast<double>(n), p);
      row.t = row.m / np;
      row.u = dist.second_moment() / (np * np);
      row.e = row.m / std::pow(static_cast<double>(n + 1), p);
      d_prev = row.d;
      if (std::abs(row.m - row.m_rec) > 1e-9 * std::max(1.0, row.m))
        throw std::runtime_error(
            "exact: mean recursion drifted from the distribution sweep at n = " +
            std::to_string(n));
    } else {
      row.m_rec = row.t = row.d = row.u = row.e = nan;
    }
    series.rows.push_back(row);
  }
  return series;
}

AsymptoticReport asymptotic_report(const RationalP& p, std::uint64_t n_max,
                                   std::uint64_t neighbor_check_max) {
  AsymptoticReport rep{
      .p = p,
      .n_max = n_max,
      .series = moment_series(RuleSpec::percentile(p), n_max, neighbor_check_max)};
  const double t_cap = 2.0 * static_cast<double>(p.den()) / static_cast<double>(p.num());
  // eps_p = min(p/2, (1-p)/2); zero at p = 1, where the floor is vacuous.
  const double pv = p.value();
  const double d_floor = std::min(pv, 1.0 - pv) / 2.0 / 3.0;

  double prev_e = 0.0;
  for (const MomentRow& row : rep.series.rows) {
    if (row.t >= t_cap && rep.first_t_violation == 0) {
      rep.t_bound_ok = false;
      rep.first_t_violation = row.n;
    }
    if (row.d < d_floor && rep.first_d_violation == 0) {
      rep.d_floor_ok = false;
      rep.first_d_violation = row.n;
    }
    if (row.e < prev_e - 1e-9 && rep.first_e_violation == 0) {
      rep.e_monotone_ok = false;
      rep.first_e_violation = row.n;
    }
    prev_e = row.e;
    if (!row.neighbor_ok) rep.neighbor_all_ok = false;
  }

  const MomentRow& last = rep.series.rows.back();
  rep.t_final = last.t;
  rep.u_final = last.u;
  rep.d_final = last.d;
  rep.e_final = last.e;

  double t_lo = last.t, t_hi = last.t, u_lo = last.u, u_hi = last.u;
  for (const MomentRow& row : rep.series.rows) {
    if (row.n < n_max / 10) continue;
    t_lo = std::min(t_lo, row.t);
    t_hi = std::max(t_hi, row.t);
    u_lo = std::min(u_lo, row.u);
    u_hi = std::max(u_hi, row.u);
  }
  rep.t_last_decade_spread = (t_hi - t_lo) / last.t;
  rep.u_last_decade_spread = (u_hi - u_lo) / last.u;
  return rep;
}

}  // namespace selectsets
