// Command-line front end: experiments, exact analysis, and enumeration
// checks, emitting CSV (or mirrored JSON) tables.
//
// Exit codes: 0 success, 1 input error, 2 invariant-check failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selectsets/exact.hpp"
#include "selectsets/io.hpp"
#include "selectsets/montecarlo.hpp"
#include "selectsets/oracle.hpp"
#include "selectsets/rule.hpp"

namespace {

using namespace selectsets;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kInvariantFailure = 2;

struct OutputOptions {
  std::string path;  // empty = stdout
  std::string format = "csv";
};

void emit(const OutputOptions& out, const std::vector<NamedTable>& blocks) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.path.empty()) {
    file.open(out.path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open output file " + out.path);
    os = &file;
  }
  if (out.format == "json")
    write_json(*os, blocks);
  else
    write_csv(*os, blocks);
}

void emit(const OutputOptions& out, Table table) {
  emit(out, std::vector<NamedTable>{{"rows", std::move(table)}});
}

unsigned resolve_worker_flag(unsigned flag_value) {
  // The environment variable takes precedence over the flag.
  if (const char* env = std::getenv("SELECTSETS_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0')
      throw std::invalid_argument(
          "SELECTSETS_WORKERS must be a nonnegative integer");
    return static_cast<unsigned>(v);
  }
  return flag_value;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text,
                                          const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoull(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad integer in --") + what +
                                  ": \"" + item + "\"");
    }
  }
  return out;
}

Table summary_to_table(const SummaryTable& summary) {
  Table t;
  t.header = {"n", "stat", "mean", "se", "reps", "seed"};
  for (const SummaryRow& row : summary.rows)
    t.add_row({row.n, row.stat, row.mean, row.se, summary.reps, summary.seed});
  return t;
}

Table histogram_to_table(const std::vector<HistogramBin>& bins) {
  Table t;
  t.header = {"bin_lo", "bin_hi", "mass"};
  for (const HistogramBin& b : bins) t.add_row({b.lo, b.hi, b.mass});
  return t;
}

int run_simulate(const RuleSpec& rule, std::uint64_t n, std::uint64_t reps,
                 std::uint64_t seed, const std::string& grid_text,
                 unsigned workers, const OutputOptions& out,
                 const std::string& hist_path) {
  ExperimentConfig config{rule};
  config.horizon = n;
  config.reps = reps;
  config.seed = seed;
  config.workers = workers;
  if (!grid_text.empty()) config.grid = parse_u64_list(grid_text, "grid");

  const SummaryTable summary = run_experiment(config);
  emit(out, summary_to_table(summary));
  if (!hist_path.empty()) {
    OutputOptions hist_out{hist_path, out.format};
    emit(hist_out, histogram_to_table(summary.histogram));
  }
  return kOk;
}

int run_exact(const RuleSpec& rule, std::uint64_t n, std::uint64_t neighbor_max,
              const OutputOptions& out) {
  if (rule.kind() != RuleKind::percentile)
    throw std::invalid_argument(
        "--rule: the exact sweep reports percentile-rule columns only "
        "(use oracle/simulate for other rules)");
  const AsymptoticReport report = asymptotic_report(rule.p(), n, neighbor_max);

  Table t;
  t.header = {"n", "M_n", "T_n", "d_n", "U_n", "e_n", "EQ_n", "ineq41_ok"};
  for (const MomentRow& row : report.series.rows)
    t.add_row({row.n, row.m, row.t, row.d, row.u, row.e, row.eq, row.neighbor_ok});
  emit(out, std::move(t));

  std::cerr << "T_n < 2/p: " << (report.t_bound_ok ? "ok" : "VIOLATED")
            << "; d_n floor: " << (report.d_floor_ok ? "ok" : "VIOLATED")
            << "; e_n monotone: " << (report.e_monotone_ok ? "ok" : "VIOLATED")
            << "; neighbor sums: " << (report.neighbor_all_ok ? "ok" : "VIOLATED")
            << "; final T=" << format_double(report.t_final)
            << " U=" << format_double(report.u_final)
            << " d=" << format_double(report.d_final) << "\n";
  return report.all_ok() ? kOk : kInvariantFailure;
}

int run_oracle(const RuleSpec& rule, std::uint64_t n, std::uint64_t sweep_len,
               const OutputOptions& out) {
  const ExactResult result = enumerate_exact(rule, n);

  Table dist;
  dist.header = {"j", "P_L_j"};
  for (std::uint64_t j = 0; j <= n; ++j)
    dist.add_row({j, result.dist[j].value()});

  Table scalars;
  scalars.header = {"stat", "value", "num", "den"};
  auto add_scalar = [&scalars](const char* stat, const Rational& r) {
    scalars.add_row({std::string(stat), r.value(), r.num(), r.den()});
  };
  add_scalar("E_L", result.e_l);
  add_scalar("E_Q", result.e_q);
  add_scalar("E_A", result.e_a);
  add_scalar("E_V", result.e_v);

  emit(out, {{"dist", std::move(dist)}, {"scalars", std::move(scalars)}});

  // Exhaustive one-step conditional-mean sweep over short prefixes.
  std::uint64_t checked = 0, failed = 0;
  for (std::uint64_t len = 1; len <= sweep_len; ++len) {
    for_each_rank_sequence(len, [&](std::span<const std::uint64_t> digits) {
      ++checked;
      if (!check_step_means(rule, digits).ok) ++failed;
    });
  }
  std::cerr << "step-mean identities: " << checked - failed << "/" << checked
            << " prefixes ok\n";
  return failed == 0 ? kOk : kInvariantFailure;
}

int run_inverse(const RuleSpec& rule, std::uint64_t m, std::uint64_t cap,
                std::uint64_t reps, std::uint64_t seed,
                const std::string& probes_text, unsigned workers,
                const OutputOptions& out) {
  InverseConfig config{rule};
  config.target_m = m;
  config.cap = cap;
  config.reps = reps;
  config.seed = seed;
  config.workers = workers;
  if (!probes_text.empty()) config.probes = parse_u64_list(probes_text, "probes");

  const InverseReport report = inverse_sampling(config);

  Table summary;
  summary.header = {"stat", "value"};
  summary.add_row({std::string("target_m"), report.target_m});
  summary.add_row({std::string("cap"), report.cap});
  summary.add_row({std::string("reps"), report.reps});
  summary.add_row({std::string("seed"), report.seed});
  summary.add_row({std::string("censored"), report.censored});
  summary.add_row({std::string("censor_rate"), report.censor_rate});
  // Wait times are heavy-tailed (infinite mean from m = 2 on); the mean below
  // is therefore reported against the cap, not as an estimate of E(N).
  summary.add_row({std::string("mean_capped"), report.mean_capped});
  summary.add_row({std::string("m_over_np_mean"), report.m_over_np_mean});
  summary.add_row({std::string("m_over_np_se"), report.m_over_np_se});

  Table quantiles;
  quantiles.header = {"level", "value"};
  for (const QuantileRow& q : report.quantiles) quantiles.add_row({q.level, q.value});

  Table survival;
  survival.header = {"n", "p_hat", "se"};
  for (const SurvivalRow& s : report.survival)
    survival.add_row({s.n, s.p_hat, s.se});

  emit(out, {{"summary", std::move(summary)},
             {"quantiles", std::move(quantiles)},
             {"survival", std::move(survival)}});
  return kOk;
}

int run_krecord(std::uint64_t k, std::uint64_t n, std::uint64_t reps,
                std::uint64_t seed, const std::string& grid_text,
                unsigned workers, const OutputOptions& out) {
  ExperimentConfig config{RuleSpec::krecord(k)};
  config.horizon = n;
  config.reps = reps;
  config.seed = seed;
  config.workers = workers;
  if (!grid_text.empty()) config.grid = parse_u64_list(grid_text, "grid");

  const KRecordReport report = krecord_report(config);
  Table t;
  t.header = {"n", "l_mean", "l_over_logn", "q_over_n1", "target"};
  for (const KRecordRow& row : report.rows)
    t.add_row({row.n, row.l_mean, row.l_over_logn, row.q_over_n1, report.target});
  emit(out, std::move(t));
  return kOk;
}

int run_table1(std::uint64_t n, std::uint64_t reps, std::uint64_t seed,
               unsigned workers, const OutputOptions& out) {
  const ReproReport report = reproduce_reference(n, reps, seed, workers);
  Table t;
  t.header = {"p", "stat", "mean", "se", "reference", "tolerance", "ok"};
  for (const ReproRow& row : report.rows)
    t.add_row({row.p.str(), row.stat, row.mean, row.se, row.reference,
               row.tolerance, row.ok});
  emit(out, std::move(t));
  return report.all_ok ? kOk : kInvariantFailure;
}

int run_validate(const RuleSpec& rule, std::uint64_t a_max) {
  const ValidationReport report = validate_rule(rule, a_max);
  if (report.ok()) {
    std::cout << rule.name() << ": ok for a <= " << a_max << "\n";
    return kOk;
  }
  for (const RuleViolation& v : report.violations)
    std::cout << rule.name() << ": " << describe(v) << "\n";
  return kInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential rank-selection experiments"};
  app.require_subcommand(1);

  std::string rule_text, grid_text, probes_text, hist_path;
  std::uint64_t n = 10000, reps = 2000, seed = 1;
  std::uint64_t m = 2, cap = 1000000, a_max = 1000, neighbor_max = 0, sweep_len = 0;
  std::uint64_t k = 1;
  unsigned workers = 0;
  OutputOptions out;

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", out.path, "Output path (default: stdout)");
    sub->add_option("--format", out.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Replicated simulation summary");
  simulate->add_option("--rule", rule_text, "Selection rule")->required();
  simulate->add_option("--n", n, "Horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--grid", grid_text, "Checkpoints, comma-separated");
  simulate->add_option("--workers", workers, "Worker threads (0 = all cores)");
  simulate->add_option("--hist", hist_path, "Also write the final histogram here");
  add_output(simulate);

  CLI::App* exact = app.add_subcommand("exact", "Moment sweep for a percentile rule");
  exact->add_option("--rule", rule_text, "percentile:<num>/<den>")->required();
  exact->add_option("--n", n, "Sweep up to this n")->check(CLI::PositiveNumber);
  exact->add_option("--neighbor-max", neighbor_max,
                    "Check neighbor sums for n up to this (0 = skip)");
  add_output(exact);

  CLI::App* oracle = app.add_subcommand("oracle", "Exact enumeration at small n");
  oracle->add_option("--rule", rule_text, "Selection rule")->required();
  oracle->add_option("--n", n, "Observations (<= 9)")->check(CLI::PositiveNumber);
  oracle->add_option("--sweep", sweep_len,
                     "Step-mean sweep over prefixes up to this length "
                     "(default min(n, 6))");
  add_output(oracle);

  CLI::App* inverse = app.add_subcommand("inverse", "Wait for the m-th retention");
  inverse->add_option("--rule", rule_text, "Selection rule")->required();
  inverse->add_option("--m", m, "Target retained count")->check(CLI::PositiveNumber);
  inverse->add_option("--cap", cap, "Censoring cap")->check(CLI::PositiveNumber);
  inverse->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  inverse->add_option("--seed", seed, "Master seed");
  inverse->add_option("--probes", probes_text, "Survival probe points");
  inverse->add_option("--workers", workers, "Worker threads (0 = all cores)");
  add_output(inverse);

  CLI::App* krecord = app.add_subcommand("krecord", "k-record growth diagnostics");
  krecord->add_option("--k", k, "Record order k")->check(CLI::PositiveNumber);
  krecord->add_option("--n", n, "Horizon")->check(CLI::PositiveNumber);
  krecord->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  krecord->add_option("--seed", seed, "Master seed");
  krecord->add_option("--grid", grid_text, "Checkpoints, comma-separated");
  krecord->add_option("--workers", workers, "Worker threads (0 = all cores)");
  add_output(krecord);

  CLI::App* table1 = app.add_subcommand(
      "table1", "Reproduce the published simulation constants");
  table1->add_option("--n", n, "Horizon")->check(CLI::PositiveNumber);
  table1->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  table1->add_option("--seed", seed, "Master seed");
  table1->add_option("--workers", workers, "Worker threads (0 = all cores)");
  add_output(table1);

  CLI::App* validate = app.add_subcommand("validate", "Check the rule axioms");
  validate->add_option("--rule", rule_text, "Selection rule")->required();
  validate->add_option("--amax", a_max, "Check cutoffs for a <= amax");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    workers = resolve_worker_flag(workers);
    if (*simulate)
      return run_simulate(RuleSpec::parse(rule_text), n, reps, seed, grid_text,
                          workers, out, hist_path);
    if (*exact) return run_exact(RuleSpec::parse(rule_text), n, neighbor_max, out);
    if (*oracle) {
      if (sweep_len == 0) sweep_len = std::min<std::uint64_t>(n, 6);
      return run_oracle(RuleSpec::parse(rule_text), n, sweep_len, out);
    }
    if (*inverse)
      return run_inverse(RuleSpec::parse(rule_text), m, cap, reps, seed,
                         probes_text, workers, out);
    if (*krecord) return run_krecord(k, n, reps, seed, grid_text, workers, out);
    if (*table1) return run_table1(n, reps, seed, workers, out);
    if (*validate) return run_validate(RuleSpec::parse(rule_text), a_max);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::runtime_error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kInvariantFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
