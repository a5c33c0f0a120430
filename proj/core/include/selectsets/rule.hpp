#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "selectsets/rational.hpp"

namespace selectsets {

enum class RuleKind { percentile, krecord, table };

// A rank selection rule: an integer cutoff function r(a) over retained-set
// sizes a. An arrival is kept iff its rank among the current retained items
// is at most r(L). Valid rules satisfy r(0) = 1, r nondecreasing, and
// r(a+1) <= r(a) + 1; validate() reports violations rather than refusing to
// construct, so deliberately broken table rules can still be run and studied.
class RuleSpec {
 public:
  static RuleSpec percentile(RationalP p);
  static RuleSpec krecord(std::uint64_t k);
  // Explicit cutoff table r(0), r(1), ...; extended constantly beyond the last
  // entry. r(0) is forced to 1 at evaluation time regardless of the first
  // entry (validate() still flags a first entry != 1).
  static RuleSpec table(std::vector<std::uint64_t> values);

  // Accepts "percentile:<num>/<den>", "krecord:<k>", "table:<v1>,<v2>,...".
  // Integer fields only; "percentile:0.5" is rejected.
  static RuleSpec parse(std::string_view text);

  RuleKind kind() const noexcept { return kind_; }
  const RationalP& p() const;                    // percentile rules only
  std::uint64_t k() const;                       // k-record rules only
  const std::vector<std::uint64_t>& values() const;  // table rules only

  // r(a): the retention cutoff given a retained items.
  std::uint64_t cutoff(std::uint64_t a) const;

  // Canonical rule string; parse(name()) round-trips.
  std::string name() const;

 private:
  RuleSpec(RuleKind kind, RationalP p, std::uint64_t k,
           std::vector<std::uint64_t> values)
      : kind_(kind), p_(p), k_(k), values_(std::move(values)) {}

  RuleKind kind_;
  RationalP p_;  // meaningful for percentile only
  std::uint64_t k_ = 0;
  std::vector<std::uint64_t> values_;
};

enum class RuleAxiom { first_cutoff_one, nondecreasing, subdiagonal };

struct RuleViolation {
  RuleAxiom axiom;
  std::uint64_t a;    // lower index of the offending step (or 0 for the first axiom)
  std::uint64_t lhs;  // the observed cutoff value
  std::uint64_t rhs;  // the bound it broke
};

struct ValidationReport {
  std::vector<RuleViolation> violations;
  std::uint64_t a_max = 0;
  bool ok() const noexcept { return violations.empty(); }
};

// Checks the three rule axioms for all a in [0, a_max]; collects every
// violation found (capped internally so a pathological table cannot flood).
ValidationReport validate_rule(const RuleSpec& rule, std::uint64_t a_max);

std::string axiom_name(RuleAxiom axiom);
std::string describe(const RuleViolation& v);

}  // namespace selectsets
