#include "selectsets/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace selectsets {

namespace {

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(rep) for rep in [0, reps), split into contiguous chunks across
// workers. body must only touch rep-indexed state.
template <class Body>
void parallel_reps(std::uint64_t reps, unsigned workers, const Body& body) {
  workers = resolve_workers(workers);
  if (workers <= 1 || reps < 2) {
    for (std::uint64_t rep = 0; rep < reps; ++rep) body(rep);
    return;
  }
  const std::uint64_t chunk = (reps + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(reps, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (std::uint64_t rep = begin; rep < end; ++rep) body(rep);
    });
  }
  for (auto& t : pool) t.join();
}

void validate_grid(std::span<const std::uint64_t> grid, std::uint64_t horizon) {
  if (grid.empty()) throw std::invalid_argument("montecarlo: empty grid");
  std::uint64_t prev = 0;
  for (std::uint64_t g : grid) {
    if (g <= prev)
      throw std::invalid_argument("montecarlo: grid must be strictly ascending");
    if (g < 1 || g > horizon)
      throw std::invalid_argument("montecarlo: grid point outside [1, horizon]");
    prev = g;
  }
}

}  // namespace

std::vector<std::uint64_t> default_grid(std::uint64_t horizon) {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = 2; n < horizon; n *= 2) grid.push_back(n);
  if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);
  if (grid.front() > horizon) grid = {horizon};
  return grid;
}

void run_trajectory(const RuleSpec& rule, std::span<const std::uint64_t> grid,
                    Xoshiro256pp& rng, std::span<Snapshot> out) {
  if (out.size() != grid.size())
    throw std::invalid_argument("montecarlo: snapshot span size mismatch");
  StreamState state(rule);
  std::size_t g = 0;
  const std::uint64_t horizon = grid.empty() ? 0 : grid.back();
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    feed(state, rng);
    if (n == grid[g]) {
      out[g] = Snapshot{n, state.l(), state.q()};
      ++g;
    }
  }
}

ReplicationMatrix run_replications(const ExperimentConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("montecarlo: reps must be >= 1");
  if (config.horizon < 1)
    throw std::invalid_argument("montecarlo: horizon must be >= 1");

  ReplicationMatrix m;
  m.grid = config.grid.empty() ? default_grid(config.horizon) : config.grid;
  validate_grid(m.grid, config.horizon);
  m.reps = config.reps;
  m.cells.resize(m.reps * m.grid.size());

  const std::uint64_t seed = config.seed;
  const auto& rule = config.rule;
  const auto& grid = m.grid;
  auto* cells = m.cells.data();
  const std::size_t width = grid.size();
  parallel_reps(config.reps, config.workers, [&](std::uint64_t rep) {
    Xoshiro256pp rng = replication_rng(seed, rep);
    run_trajectory(rule, grid, rng,
                   std::span<Snapshot>(cells + rep * width, width));
  });
  return m;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanSe mean_se(std::span<const double> values) {
  const auto count = static_cast<double>(values.size());
  if (values.empty()) return {std::nan(""), std::nan("")};
  const double mean = pairwise_sum(values) / count;
  if (values.size() == 1) return {mean, std::nan("")};
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / (count - 1.0);
  return {mean, std::sqrt(var / count)};
}

std::vector<HistogramBin> make_histogram(std::span<const double> values,
                                         std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo))
    throw std::invalid_argument("montecarlo: bad histogram geometry");
  std::vector<std::uint64_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (v < lo || v > hi)
      throw std::invalid_argument("montecarlo: histogram value out of range");
    auto b = static_cast<std::size_t>((v - lo) / width);
    if (b >= bins) b = bins - 1;  // v == hi
    ++counts[b];
  }
  std::vector<HistogramBin> out(bins);
  const double inv = values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size());
  for (std::size_t b = 0; b < bins; ++b) {
    out[b] = HistogramBin{lo + width * static_cast<double>(b),
                          lo + width * static_cast<double>(b + 1),
                          static_cast<double>(counts[b]) * inv};
  }
  return out;
}

double a_n_normalizer(const RationalP& p, std::uint64_t n) {
  const auto nd = static_cast<double>(n);
  // Exact comparison of p against 1/2.
  const unsigned __int128 twice_num =
      static_cast<unsigned __int128>(p.num()) * 2;
  if (twice_num < p.den()) return std::pow(nd, 1.0 - p.value());
  if (twice_num == p.den()) return std::sqrt(nd) * std::log(nd);
  return std::pow(nd, p.value());
}

double ks_distance_uniform(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("montecarlo: KS distance of an empty sample");
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = std::clamp(values[i], 0.0, 1.0);
    ks = std::max(ks, f - static_cast<double>(i) / count);
    ks = std::max(ks, static_cast<double>(i + 1) / count - f);
  }
  return ks;
}

SummaryTable summarize(const ExperimentConfig& config, const ReplicationMatrix& m) {
  SummaryTable table;
  table.rule = config.rule.name();
  table.horizon = config.horizon;
  table.reps = config.reps;
  table.seed = config.seed;

  const RuleKind kind = config.rule.kind();
  for (std::size_t g = 0; g < m.grid.size(); ++g) {
    const std::uint64_t n = m.grid[g];
    const auto nd = static_cast<double>(n);
    auto add_row = [&](const std::string& stat, std::vector<double> vals) {
      const MeanSe ms = mean_se(vals);
      table.rows.push_back(SummaryRow{n, stat, ms.mean, ms.se});
    };

    std::vector<double> col(m.reps);
    auto fill = [&](auto&& f) {
      for (std::uint64_t rep = 0; rep < m.reps; ++rep) {
        const Snapshot& s = m.at(rep, g);
        col[rep] = f(s);
      }
      return col;
    };

    if (kind == RuleKind::percentile) {
      const RationalP& p = config.rule.p();
      const double np = std::pow(nd, p.value());
      const double an = a_n_normalizer(p, n);
      const bool half = p.num() * 2 == p.den();
      add_row("L_over_np",
              fill([&](const Snapshot& s) { return static_cast<double>(s.l) / np; }));
      add_row("A_over_an", fill([&](const Snapshot& s) {
                return static_cast<double>(s.q) / static_cast<double>(s.l) / an;
              }));
      if (half) {
        const double logn = std::log(nd);
        add_row("V_over_logn", fill([&](const Snapshot& s) {
                  const double l = static_cast<double>(s.l);
                  return static_cast<double>(s.q) / (l * l) / logn;
                }));
      } else {
        add_row("V", fill([&](const Snapshot& s) {
                  const double l = static_cast<double>(s.l);
                  return static_cast<double>(s.q) / (l * l);
                }));
      }
    } else if (kind == RuleKind::krecord) {
      add_row("L", fill([](const Snapshot& s) { return static_cast<double>(s.l); }));
      if (n >= 2) {
        const double logn = std::log(nd);
        add_row("L_over_logn", fill([&](const Snapshot& s) {
                  return static_cast<double>(s.l) / logn;
                }));
      }
      add_row("Q_over_n1", fill([&](const Snapshot& s) {
                return static_cast<double>(s.q) / (nd + 1.0);
              }));
    } else {
      add_row("L", fill([](const Snapshot& s) { return static_cast<double>(s.l); }));
      add_row("A", fill([](const Snapshot& s) {
                return static_cast<double>(s.q) / static_cast<double>(s.l);
              }));
      add_row("V", fill([](const Snapshot& s) {
                const double l = static_cast<double>(s.l);
                return static_cast<double>(s.q) / (l * l);
              }));
    }
  }

  // Histogram of the final checkpoint's normalized retained count.
  const std::size_t last = m.grid.size() - 1;
  std::vector<double> final_l(m.reps);
  double scale = 1.0;
  if (kind == RuleKind::percentile)
    scale = std::pow(static_cast<double>(m.grid[last]), config.rule.p().value());
  for (std::uint64_t rep = 0; rep < m.reps; ++rep)
    final_l[rep] = static_cast<double>(m.at(rep, last).l) / scale;
  const double hi = std::max(1.0, *std::max_element(final_l.begin(), final_l.end()));
  table.histogram = make_histogram(final_l, 50, 0.0, hi);
  return table;
}

SummaryTable run_experiment(const ExperimentConfig& config) {
  return summarize(config, run_replications(config));
}

VLimitReport v_limit_report(const RationalP& p, const ExperimentConfig& base) {
  const unsigned __int128 twice_num = static_cast<unsigned __int128>(p.num()) * 2;
  if (twice_num < p.den())
    throw std::invalid_argument(
        "montecarlo: V-limit report is defined for p >= 1/2 (V diverges below)");
  const bool half = twice_num == p.den();

  ExperimentConfig config = base;
  config.rule = RuleSpec::percentile(p);
  if (config.grid.empty()) {
    // Decade checkpoints 100, 1000, ... up to the horizon.
    for (std::uint64_t n = 100; n < config.horizon; n *= 10)
      config.grid.push_back(n);
    if (config.grid.empty() || config.grid.back() != config.horizon)
      config.grid.push_back(config.horizon);
  }
  const ReplicationMatrix m = run_replications(config);

  VLimitReport report;
  report.estimator = half ? "ratio-of-means" : "mean";
  report.target = half ? 0.125
                       : p.value() * p.value() / (2.0 * (2.0 * p.value() - 1.0));

  for (std::size_t g = 0; g < m.grid.size(); ++g) {
    const std::uint64_t n = m.grid[g];
    const auto nd = static_cast<double>(n);
    VLimitRow row{n, 0.0, 0.0, 0.0};
    if (!half) {
      std::vector<double> v(m.reps);
      for (std::uint64_t rep = 0; rep < m.reps; ++rep) {
        const Snapshot& s = m.at(rep, g);
        const double l = static_cast<double>(s.l);
        v[rep] = static_cast<double>(s.q) / (l * l);
      }
      const MeanSe ms = mean_se(v);
      row.estimate = ms.mean;
      row.se = ms.se;
    } else {
      const double an = a_n_normalizer(p, n);
      const double np = std::sqrt(nd);
      std::vector<double> a_norm(m.reps), l_norm(m.reps);
      for (std::uint64_t rep = 0; rep < m.reps; ++rep) {
        const Snapshot& s = m.at(rep, g);
        a_norm[rep] = static_cast<double>(s.q) / static_cast<double>(s.l) / an;
        l_norm[rep] = static_cast<double>(s.l) / np;
      }
      const MeanSe top = mean_se(a_norm);
      const MeanSe bottom = mean_se(l_norm);
      row.estimate = top.mean / bottom.mean;
      row.se = row.estimate * std::sqrt((top.se / top.mean) * (top.se / top.mean) +
                                        (bottom.se / bottom.mean) *
                                            (bottom.se / bottom.mean));
    }
    row.gap = row.estimate - report.target;
    report.rows.push_back(row);
  }

  report.gap_decreasing = report.rows.size() >= 2;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (std::abs(report.rows[i].gap) >= std::abs(report.rows[i - 1].gap))
      report.gap_decreasing = false;
  return report;
}

KRecordReport krecord_report(const ExperimentConfig& base) {
  if (base.rule.kind() != RuleKind::krecord)
    throw std::invalid_argument("montecarlo: k-record report needs a krecord rule");
  const ReplicationMatrix m = run_replications(base);

  KRecordReport report;
  report.k = base.rule.k();
  report.target = static_cast<double>(report.k);
  for (std::size_t g = 0; g < m.grid.size(); ++g) {
    const std::uint64_t n = m.grid[g];
    std::vector<double> l(m.reps), q1(m.reps);
    for (std::uint64_t rep = 0; rep < m.reps; ++rep) {
      const Snapshot& s = m.at(rep, g);
      l[rep] = static_cast<double>(s.l);
      q1[rep] = static_cast<double>(s.q) / (static_cast<double>(n) + 1.0);
    }
    KRecordRow row;
    row.n = n;
    row.l_mean = mean_se(l).mean;
    row.l_over_logn =
        n >= 2 ? row.l_mean / std::log(static_cast<double>(n)) : std::nan("");
    row.q_over_n1 = mean_se(q1).mean;
    report.rows.push_back(row);
  }
  return report;
}

std::span<const ReferenceRow> reference_rows() {
  static const ReferenceRow kRows[] = {
      {1, 10, 4.178, 0.238}, {2, 10, 2.674, 0.401}, {3, 10, 2.111, 0.578},
      {4, 10, 1.653, 0.967}, {5, 10, 1.181, 0.214}, {6, 10, 1.198, 0.978},
      {7, 10, 1.045, 0.634}, {8, 10, 0.841, 0.449}, {9, 10, 0.693, 0.351},
      {10, 10, 0.500, 0.250},
  };
  return kRows;
}

ReproReport reproduce_reference(std::uint64_t n, std::uint64_t reps,
                                std::uint64_t seed, unsigned workers) {
  ReproReport report;
  report.n = n;
  report.reps = reps;
  report.seed = seed;

  for (const ReferenceRow& ref : reference_rows()) {
    const RationalP p(ref.p_num, ref.p_den);
    ExperimentConfig config{RuleSpec::percentile(p)};
    config.horizon = n;
    config.reps = reps;
    config.seed = seed;
    config.grid = {n};
    config.workers = workers;
    const ReplicationMatrix m = run_replications(config);

    const double np = std::pow(static_cast<double>(n), p.value());
    const double an = a_n_normalizer(p, n);
    std::vector<double> l_col(reps), a_col(reps);
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
      const Snapshot& s = m.at(rep, 0);
      l_col[rep] = static_cast<double>(s.l) / np;
      a_col[rep] = static_cast<double>(s.q) / static_cast<double>(s.l) / an;
    }

    auto push = [&](const std::string& stat, const MeanSe ms, double reference) {
      const double combined = std::sqrt(ms.se * ms.se + 0.002 * 0.002);
      const double tolerance = std::max(3.0 * combined, 0.05);
      const bool ok = std::abs(ms.mean - reference) <= tolerance;
      if (!ok) report.all_ok = false;
      report.rows.push_back(ReproRow{p, stat, ms.mean, ms.se, reference, tolerance, ok});
    };
    push("L_over_np", mean_se(l_col), ref.l_ref);
    push("A_over_an", mean_se(a_col), ref.a_ref);
  }
  return report;
}

InverseReport inverse_sampling(const InverseConfig& config) {
  if (config.target_m < 1)
    throw std::invalid_argument("montecarlo: inverse target must be >= 1");
  if (config.cap < 1) throw std::invalid_argument("montecarlo: cap must be >= 1");
  if (config.reps < 1) throw std::invalid_argument("montecarlo: reps must be >= 1");
  for (std::uint64_t probe : config.probes)
    if (probe >= config.cap)
      throw std::invalid_argument(
          "montecarlo: survival probe must lie below the cap");

  // N per replication; cap+1 is the censoring sentinel ("N exceeds the cap").
  std::vector<std::uint64_t> waits(config.reps);
  const std::uint64_t sentinel = config.cap + 1;
  auto* out = waits.data();
  parallel_reps(config.reps, config.workers, [&](std::uint64_t rep) {
    Xoshiro256pp rng = replication_rng(config.seed, rep);
    StreamState state(config.rule);
    std::uint64_t n = 0;
    while (state.l() < config.target_m && n < config.cap) {
      feed(state, rng);
      ++n;
    }
    out[rep] = state.l() >= config.target_m ? n : sentinel;
  });

  InverseReport report;
  report.target_m = config.target_m;
  report.cap = config.cap;
  report.reps = config.reps;
  report.seed = config.seed;

  std::vector<double> capped(config.reps);
  std::vector<double> m_over_np;
  const bool pct = config.rule.kind() == RuleKind::percentile;
  const double pv = pct ? config.rule.p().value() : 0.0;
  const auto md = static_cast<double>(config.target_m);
  for (std::uint64_t rep = 0; rep < config.reps; ++rep) {
    if (waits[rep] == sentinel) {
      ++report.censored;
      capped[rep] = static_cast<double>(config.cap);
    } else {
      capped[rep] = static_cast<double>(waits[rep]);
      if (pct)
        m_over_np.push_back(md / std::pow(static_cast<double>(waits[rep]), pv));
    }
  }
  report.censor_rate =
      static_cast<double>(report.censored) / static_cast<double>(config.reps);
  report.mean_capped = mean_se(capped).mean;

  for (std::uint64_t probe : config.probes) {
    std::uint64_t beyond = 0;
    for (std::uint64_t w : waits)
      if (w > probe) ++beyond;
    const double p_hat =
        static_cast<double>(beyond) / static_cast<double>(config.reps);
    const double se = std::sqrt(p_hat * (1.0 - p_hat) /
                                static_cast<double>(config.reps));
    report.survival.push_back(SurvivalRow{probe, p_hat, se});
  }

  std::vector<std::uint64_t> sorted = waits;
  std::sort(sorted.begin(), sorted.end());
  for (double level : config.quantile_levels) {
    if (level < 0.0 || level > 1.0)
      throw std::invalid_argument("montecarlo: quantile level outside [0, 1]");
    auto idx = static_cast<std::size_t>(level * static_cast<double>(sorted.size() - 1));
    const std::uint64_t v = sorted[idx];
    report.quantiles.push_back(QuantileRow{
        level, v == sentinel ? std::numeric_limits<double>::infinity()
                             : static_cast<double>(v)});
  }

  if (pct) {
    const MeanSe ms = mean_se(m_over_np);
    report.m_over_np_mean = ms.mean;
    report.m_over_np_se = ms.se;
  } else {
    report.m_over_np_mean = std::nan("");
    report.m_over_np_se = std::nan("");
  }
  return report;
}

}  // namespace selectsets
