#include "selectsets/rule.hpp"

#include <charconv>
#include <stdexcept>

namespace selectsets {

namespace {

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw std::invalid_argument(std::string("rule: expected an integer for ") +
                                what + ", got \"" + std::string(text) + "\"");
  return value;
}

}  // namespace

RuleSpec RuleSpec::percentile(RationalP p) {
  return RuleSpec(RuleKind::percentile, p, 0, {});
}

RuleSpec RuleSpec::krecord(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("rule: krecord k must be >= 1");
  return RuleSpec(RuleKind::krecord, RationalP(1, 1), k, {});
}

RuleSpec RuleSpec::table(std::vector<std::uint64_t> values) {
  if (values.empty()) throw std::invalid_argument("rule: empty cutoff table");
  return RuleSpec(RuleKind::table, RationalP(1, 1), 0, std::move(values));
}

RuleSpec RuleSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("rule: expected <kind>:<args>, got \"" +
                                std::string(text) + "\"");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);

  if (kind == "percentile") {
    const auto slash = args.find('/');
    if (slash == std::string_view::npos)
      throw std::invalid_argument(
          "rule: percentile wants <num>/<den> (exact rational; decimals such "
          "as 0.5 are not accepted)");
    const std::uint64_t num = parse_u64(args.substr(0, slash), "percentile numerator");
    const std::uint64_t den = parse_u64(args.substr(slash + 1), "percentile denominator");
    return percentile(RationalP(num, den));
  }
  if (kind == "krecord") {
    return krecord(parse_u64(args, "krecord k"));
  }
  if (kind == "table") {
    std::vector<std::uint64_t> values;
    std::size_t start = 0;
    while (start <= args.size()) {
      auto comma = args.find(',', start);
      if (comma == std::string_view::npos) comma = args.size();
      values.push_back(parse_u64(args.substr(start, comma - start), "table entry"));
      start = comma + 1;
    }
    return table(std::move(values));
  }
  throw std::invalid_argument("rule: unknown kind \"" + std::string(kind) +
                              "\" (expected percentile, krecord, or table)");
}

const RationalP& RuleSpec::p() const {
  if (kind_ != RuleKind::percentile)
    throw std::logic_error("rule: p() on a non-percentile rule");
  return p_;
}

std::uint64_t RuleSpec::k() const {
  if (kind_ != RuleKind::krecord)
    throw std::logic_error("rule: k() on a non-krecord rule");
  return k_;
}

const std::vector<std::uint64_t>& RuleSpec::values() const {
  if (kind_ != RuleKind::table)
    throw std::logic_error("rule: values() on a non-table rule");
  return values_;
}

std::uint64_t RuleSpec::cutoff(std::uint64_t a) const {
  switch (kind_) {
    case RuleKind::percentile:
      return ceil_mul(p_, a);
    case RuleKind::krecord:
      return a >= k_ ? k_ : a + 1;
    case RuleKind::table:
      if (a == 0) return 1;
      return a < values_.size() ? values_[a] : values_.back();
  }
  throw std::logic_error("rule: corrupt kind");
}

std::string RuleSpec::name() const {
  switch (kind_) {
    case RuleKind::percentile:
      return "percentile:" + p_.str();
    case RuleKind::krecord:
      return "krecord:" + std::to_string(k_);
    case RuleKind::table: {
      std::string out = "table:";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values_[i]);
      }
      return out;
    }
  }
  throw std::logic_error("rule: corrupt kind");
}

ValidationReport validate_rule(const RuleSpec& rule, std::uint64_t a_max) {
  constexpr std::size_t kMaxReported = 64;
  ValidationReport report;
  report.a_max = a_max;

  // First axiom on the declared value, not the evaluated one: table rules
  // evaluate r(0) as 1 unconditionally, which would mask a bad declaration.
  const std::uint64_t r0 = rule.kind() == RuleKind::table
                               ? rule.values().front()
                               : rule.cutoff(0);
  if (r0 != 1)
    report.violations.push_back({RuleAxiom::first_cutoff_one, 0, r0, 1});

  std::uint64_t prev = rule.cutoff(0);
  for (std::uint64_t a = 0; a < a_max; ++a) {
    const std::uint64_t next = rule.cutoff(a + 1);
    if (next < prev)
      report.violations.push_back({RuleAxiom::nondecreasing, a, next, prev});
    if (next > prev + 1)
      report.violations.push_back({RuleAxiom::subdiagonal, a, next, prev + 1});
    if (report.violations.size() >= kMaxReported) break;
    prev = next;
  }
  return report;
}

std::string axiom_name(RuleAxiom axiom) {
  switch (axiom) {
    case RuleAxiom::first_cutoff_one: return "first-cutoff-one";
    case RuleAxiom::nondecreasing: return "nondecreasing";
    case RuleAxiom::subdiagonal: return "subdiagonality";
  }
  return "unknown";
}

std::string describe(const RuleViolation& v) {
  switch (v.axiom) {
    case RuleAxiom::first_cutoff_one:
      return "first-cutoff-one violation: r(0) = " + std::to_string(v.lhs) +
             ", expected 1";
    case RuleAxiom::nondecreasing:
      return "nondecreasing violation at a = " + std::to_string(v.a) +
             " (r(" + std::to_string(v.a + 1) + ") = " + std::to_string(v.lhs) +
             " < r(" + std::to_string(v.a) + ") = " + std::to_string(v.rhs) + ")";
    case RuleAxiom::subdiagonal:
      return "subdiagonality violation at a = " + std::to_string(v.a) +
             " (r(" + std::to_string(v.a + 1) + ") = " + std::to_string(v.lhs) +
             " > r(" + std::to_string(v.a) + ") + 1 = " + std::to_string(v.rhs) + ")";
  }
  return "unknown violation";
}

}  // namespace selectsets
