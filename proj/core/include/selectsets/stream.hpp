#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "selectsets/order_tree.hpp"
#include "selectsets/rule.hpp"

namespace selectsets {

// Two observations compared equal. The engine's rank bookkeeping assumes a
// strict total order on observed values (ties have probability zero for
// continuous inputs); callers drawing from an RNG should redraw.
struct TieError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// L, Q, A = Q/L, V = Q/L^2 for the current stream position.
struct StreamStats {
  std::uint64_t l;
  std::uint64_t q;
  double a;
  double v;
};

// Sequential selection over a stream of distinct reals. After each arrival x:
// keep x iff its rank among the retained items is at most r(L). Q tracks the
// sum of the retained items' ranks among *all* observations so far, updated
// incrementally: any arrival bumps by one the rank of every retained item
// above it, and a kept arrival adds its own rank, making the kept-step total
// exactly L+1 (see step() for why).
//
// The decision is made in threshold form — compare x against the r(L)-th
// smallest retained value — so a step costs O(log L) regardless of n. In
// audit mode the full observation history is kept as well, and every decision
// is re-derived in rank form (rank of x among all observations vs r(L)); the
// two forms agree for valid rules, and disagreements are counted rather than
// asserted so that deliberately invalid table rules can be studied.
class StreamState {
 public:
  explicit StreamState(RuleSpec rule, bool audit = false)
      : rule_(std::move(rule)), audit_(audit) {}

  // Feeds one observation; returns true iff it was retained.
  bool step(double x);

  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t l() const noexcept { return retained_.size(); }
  std::uint64_t q() const noexcept { return q_; }
  bool audit() const noexcept { return audit_; }
  const RuleSpec& rule() const noexcept { return rule_; }

  // r(L): the cutoff the next arrival will face.
  std::uint64_t next_cutoff() const { return rule_.cutoff(retained_.size()); }

  // Pre: at least one observation. Throws std::logic_error on an empty stream.
  StreamStats stats() const;

  std::vector<double> retained_sorted() const { return retained_.sorted(); }

  // --- audit-mode queries (throw std::logic_error when audit is off) ---

  // Rank a hypothetical next observation x among observed-so-far plus x.
  std::uint64_t rank_of_new(double x) const;

  // Recomputes Q from scratch out of the audit log; equals q() always.
  std::uint64_t recompute_q() const;

  // True iff the min(r(L), n) best observations so far are all retained.
  bool top_block_retained() const;

  // Threshold-form vs rank-form decision disagreements seen so far.
  // Zero for every valid rule; positive for some invalid tables.
  std::uint64_t decision_mismatches() const noexcept { return mismatches_; }

  // (observation, was_retained) pairs in arrival order.
  const std::vector<std::pair<double, bool>>& audit_log() const;

 private:
  void require_audit(const char* what) const;

  RuleSpec rule_;
  bool audit_;
  OrderTree retained_;
  OrderTree observed_;  // audit mode only
  std::vector<std::pair<double, bool>> log_;  // audit mode only
  std::uint64_t n_ = 0;
  std::uint64_t q_ = 0;
  std::uint64_t mismatches_ = 0;
};

}  // namespace selectsets
