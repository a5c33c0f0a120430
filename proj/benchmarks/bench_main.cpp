// Microbenchmarks for the hot paths: the per-observation engine step across
// rule families and retained-set sizes, the distribution sweep, and the
// order-statistic tree underneath them.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "selectsets/exact.hpp"
#include "selectsets/montecarlo.hpp"
#include "selectsets/order_tree.hpp"
#include "selectsets/rng.hpp"
#include "selectsets/stream.hpp"

using namespace selectsets;

namespace {

RuleSpec rule_for(int id) {
  switch (id) {
    case 0: return RuleSpec::percentile(RationalP(1, 10));
    case 1: return RuleSpec::percentile(RationalP(1, 2));
    case 2: return RuleSpec::percentile(RationalP(9, 10));
    case 3: return RuleSpec::percentile(RationalP(1, 1));
    default: return RuleSpec::krecord(5);
  }
}

const char* rule_label(int id) {
  switch (id) {
    case 0: return "percentile:1/10";
    case 1: return "percentile:1/2";
    case 2: return "percentile:9/10";
    case 3: return "percentile:1/1";
    default: return "krecord:5";
  }
}

void BM_StreamStep(benchmark::State& state) {
  const RuleSpec rule = rule_for(static_cast<int>(state.range(0)));
  const auto horizon = static_cast<std::uint64_t>(state.range(1));
  state.SetLabel(rule_label(static_cast<int>(state.range(0))));

  Xoshiro256pp rng(99);
  std::uint64_t steps = 0;
  for (auto _ : state) {
    StreamState stream(rule);
    for (std::uint64_t n = 0; n < horizon; ++n) feed(stream, rng);
    steps += horizon;
    benchmark::DoNotOptimize(stream.q());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_StreamStep)
    ->ArgsProduct({{0, 1, 2, 3, 4}, {1024, 16384}})
    ->Unit(benchmark::kMicrosecond);

void BM_AuditedStreamStep(benchmark::State& state) {
  const auto horizon = static_cast<std::uint64_t>(state.range(0));
  Xoshiro256pp rng(99);
  std::uint64_t steps = 0;
  for (auto _ : state) {
    StreamState stream(RuleSpec::percentile(RationalP(1, 2)), /*audit=*/true);
    for (std::uint64_t n = 0; n < horizon; ++n) {
      feed(stream, rng);
      benchmark::DoNotOptimize(stream.top_block_retained());
    }
    steps += horizon;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_AuditedStreamStep)->Arg(1024)->Arg(8192)->Unit(benchmark::kMicrosecond);

void BM_DistributionSweep(benchmark::State& state) {
  const auto n_max = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    LDistribution dist(RuleSpec::percentile(RationalP(1, 2)));
    dist.advance_to(n_max);
    benchmark::DoNotOptimize(dist.mean());
  }
  state.SetComplexityN(static_cast<std::int64_t>(n_max));
}
BENCHMARK(BM_DistributionSweep)
    ->RangeMultiplier(4)
    ->Range(256, 16384)
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNSquared);

void BM_MomentSweep(benchmark::State& state) {
  const auto n_max = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    const MomentSeries series =
        moment_series(RuleSpec::percentile(RationalP(1, 2)), n_max);
    benchmark::DoNotOptimize(series.rows.back().eq);
  }
}
BENCHMARK(BM_MomentSweep)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_OrderTreeInsert(benchmark::State& state) {
  const auto size = static_cast<std::uint64_t>(state.range(0));
  Xoshiro256pp rng(7);
  std::vector<double> values(size);
  for (auto& v : values) v = rng.uniform();
  std::uint64_t items = 0;
  for (auto _ : state) {
    OrderTree tree;
    for (double v : values) tree.insert(v);
    items += size;
    benchmark::DoNotOptimize(tree.size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(items));
}
BENCHMARK(BM_OrderTreeInsert)
    ->RangeMultiplier(8)
    ->Range(1024, 65536)
    ->Unit(benchmark::kMicrosecond);

void BM_OrderTreeKth(benchmark::State& state) {
  const auto size = static_cast<std::uint64_t>(state.range(0));
  Xoshiro256pp rng(7);
  OrderTree tree;
  while (tree.size() < size) tree.insert(rng.uniform());
  std::uint64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.kth(k));
    k = k % size + 1;
  }
}
BENCHMARK(BM_OrderTreeKth)->Arg(1024)->Arg(65536);

void BM_Replications(benchmark::State& state) {
  ExperimentConfig config{RuleSpec::percentile(RationalP(1, 2))};
  config.horizon = 4096;
  config.reps = 32;
  config.seed = 1;
  config.workers = 1;
  for (auto _ : state) {
    const ReplicationMatrix m = run_replications(config);
    benchmark::DoNotOptimize(m.cells.back().q);
  }
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations() * config.reps * config.horizon));
}
BENCHMARK(BM_Replications)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
