#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selectsets/rng.hpp"
#include "selectsets/rule.hpp"
#include "selectsets/stream.hpp"

namespace selectsets {

// Replicated-simulation harness. Reproducibility contract: the output of
// every function here is a pure function of (rule, horizon/grid, reps, seed) —
// independent of worker count — because each replication derives its own RNG
// from (seed, rep), results land in a rep-indexed matrix, and reductions run
// in a fixed order.

struct ExperimentConfig {
  RuleSpec rule;
  std::uint64_t horizon = 10000;
  std::uint64_t reps = 2000;
  std::uint64_t seed = 1;
  // Checkpoints at which (L, Q) is recorded; must be ascending, within
  // [1, horizon]. Empty selects default_grid(horizon).
  std::vector<std::uint64_t> grid;
  unsigned workers = 0;  // 0 = all hardware threads
};

// Powers of two up to the horizon, plus the horizon itself.
std::vector<std::uint64_t> default_grid(std::uint64_t horizon);

struct Snapshot {
  std::uint64_t n, l, q;
};

// Feeds one uniform draw, redrawing on the (probability-zero) tie.
inline bool feed(StreamState& state, Xoshiro256pp& rng) {
  for (;;) {
    try {
      return state.step(rng.uniform());
    } catch (const TieError&) {
    }
  }
}

// One trajectory; writes a snapshot per grid entry into `out`
// (out.size() == grid.size()).
void run_trajectory(const RuleSpec& rule, std::span<const std::uint64_t> grid,
                    Xoshiro256pp& rng, std::span<Snapshot> out);

struct ReplicationMatrix {
  std::vector<std::uint64_t> grid;
  std::uint64_t reps = 0;
  std::vector<Snapshot> cells;  // rep-major: cells[rep * grid.size() + g]

  const Snapshot& at(std::uint64_t rep, std::size_t g) const {
    return cells[rep * grid.size() + g];
  }
};

ReplicationMatrix run_replications(const ExperimentConfig& config);

// Binary-tree summation in a fixed order; used for all aggregation so that
// results do not depend on how replications were partitioned across workers.
double pairwise_sum(std::span<const double> values);

struct MeanSe {
  double mean;
  double se;  // standard error of the mean (sample sd / sqrt(count))
};
MeanSe mean_se(std::span<const double> values);

struct SummaryRow {
  std::uint64_t n;
  std::string stat;
  double mean;
  double se;
};

struct HistogramBin {
  double lo, hi, mass;
};

// Equal-width bins over [lo, hi]; top edge inclusive. Masses sum to 1.
std::vector<HistogramBin> make_histogram(std::span<const double> values,
                                         std::size_t bins, double lo, double hi);

// Per-checkpoint normalized statistics. Stat names by rule kind:
//   percentile: L_over_np (L/n^p), A_over_an (A/a_n(p)),
//               V (or V_over_logn when p = 1/2)
//   krecord:    L, L_over_logn (n >= 2 only), Q_over_n1 (Q/(n+1))
//   table:      L, A, V
// The histogram sketches the final checkpoint's L/n^p (percentile) or L.
struct SummaryTable {
  std::string rule;
  std::uint64_t horizon = 0, reps = 0, seed = 0;
  std::vector<SummaryRow> rows;
  std::vector<HistogramBin> histogram;
};

SummaryTable summarize(const ExperimentConfig& config, const ReplicationMatrix& m);
SummaryTable run_experiment(const ExperimentConfig& config);

// a_n(p): n^(1-p) below the half point, sqrt(n) log n at it, n^p above it.
double a_n_normalizer(const RationalP& p, std::uint64_t n);

// Kolmogorov-Smirnov distance between a sample and U(0,1).
double ks_distance_uniform(std::vector<double> values);

// --- limit diagnostics -----------------------------------------------------

struct VLimitRow {
  std::uint64_t n;
  double estimate;
  double se;
  double gap;  // estimate - target
};

// Convergence report for V = Q/L^2, defined for percentile p >= 1/2.
// p > 1/2: per-replication mean of V at each checkpoint; target q_p =
// p^2 / (2(2p-1)). p = 1/2: V/log n concentrates too slowly for its raw mean
// (rare small-L replications carry V ~ n/L^2), so the estimate is the ratio
// of means  mean(A/a_n) / mean(L/sqrt n), whose target is 1/8; its se column
// is first-order error propagation with correlations ignored.
struct VLimitReport {
  std::string estimator;  // "mean" or "ratio-of-means"
  double target;
  std::vector<VLimitRow> rows;  // one per checkpoint, ascending n
  bool gap_decreasing = false;  // |gap| strictly decreasing across rows
};
VLimitReport v_limit_report(const RationalP& p, const ExperimentConfig& base);

struct KRecordRow {
  std::uint64_t n;
  double l_mean;
  double l_over_logn;  // NaN at n = 1
  double q_over_n1;
};

// Growth diagnostics for k-record rules: E(L_n)/log n -> k and
// E(Q_n)/(n+1) -> k.
struct KRecordReport {
  std::uint64_t k = 0;
  double target = 0;  // = k
  std::vector<KRecordRow> rows;
};
KRecordReport krecord_report(const ExperimentConfig& base);  // pre: krecord rule

// --- published-constant reproduction -----------------------------------------

// Simulation constants E(L_n/n^p) and E(A_n/a_n(p)) at n = 10^4 for
// p = 1/10 .. 10/10, as published (10^4 replications; sampling noise of a few
// multiples of 0.002 and, for the small-p L columns, up to ~0.016).
struct ReferenceRow {
  std::uint64_t p_num, p_den;
  double l_ref;  // E(L_n / n^p)
  double a_ref;  // E(A_n / a_n(p))
};
std::span<const ReferenceRow> reference_rows();

struct ReproRow {
  RationalP p;
  std::string stat;  // "L_over_np" or "A_over_an"
  double mean, se, reference, tolerance;
  bool ok;
};

// Re-estimates both reference columns for every p and compares within
// max(3 sqrt(se^2 + 0.002^2), 0.05) — the published values carry their own
// sampling noise, hence the floor.
struct ReproReport {
  std::uint64_t n = 0, reps = 0, seed = 0;
  std::vector<ReproRow> rows;
  bool all_ok = true;
};
ReproReport reproduce_reference(std::uint64_t n, std::uint64_t reps,
                                std::uint64_t seed, unsigned workers);

// --- inverse sampling -------------------------------------------------------

struct InverseConfig {
  RuleSpec rule;
  std::uint64_t target_m = 2;     // stop once L reaches this
  std::uint64_t cap = 1000000;    // censor at this many observations
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::vector<std::uint64_t> probes;      // report P(N > n) at these n (< cap)
  std::vector<double> quantile_levels{0.5, 0.9, 0.99};
};

struct SurvivalRow {
  std::uint64_t n;
  double p_hat;  // P(N > n)
  double se;     // binomial
};

struct QuantileRow {
  double level;
  double value;  // +inf when the quantile is censored
};

// Observation counts N until the m-th retention. The waiting times have
// infinite mean already at m = 2, so the report leans on quantiles, survival
// probabilities, and an explicitly capped mean.
struct InverseReport {
  std::uint64_t target_m = 0, cap = 0, reps = 0, seed = 0;
  std::uint64_t censored = 0;
  double censor_rate = 0;
  double mean_capped = 0;  // mean of min(N, cap); see heavy_tailed
  bool heavy_tailed = true;
  std::vector<QuantileRow> quantiles;
  std::vector<SurvivalRow> survival;
  // m / N^p over uncensored replications (percentile rules; NaN otherwise).
  double m_over_np_mean = 0;
  double m_over_np_se = 0;
};
InverseReport inverse_sampling(const InverseConfig& config);

}  // namespace selectsets
