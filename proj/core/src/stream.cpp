#include "selectsets/stream.hpp"

#include <algorithm>
#include <string>

namespace selectsets {

bool StreamState::step(double x) {
  const std::uint64_t len = retained_.size();

  bool dup = false;
  const std::size_t below = retained_.count_less(x, &dup);
  if (audit_ ? observed_.contains(x) : dup)
    throw TieError("stream: duplicate observation " + std::to_string(x));

  const std::uint64_t j = rule_.cutoff(len);
  // j > len covers the empty set and any rule asking for more items than are
  // retained: there is no j-th smallest retained value to lose against.
  const bool keep = j > len || x < retained_.kth(j);

  if (audit_) {
    const std::uint64_t rank = observed_.count_less(x) + 1;
    if ((rank <= j) != keep) ++mismatches_;
    observed_.insert(x);
    log_.emplace_back(x, keep);
  }

  ++n_;
  // Every retained item above x gains one rank among all observations. A kept
  // arrival additionally contributes its own rank, which equals below+1: for
  // valid rules every observed value under a kept arrival is itself retained
  // (if a non-retained y < x existed, the top-block property would place
  // r(L) retained values under y, pushing x's retained-rank past the cutoff).
  // Total for a kept arrival: (len - below) + (below + 1) = len + 1.
  if (keep) {
    retained_.insert(x);
    q_ += len + 1;
  } else {
    q_ += len - below;
  }
  return keep;
}

StreamStats StreamState::stats() const {
  const std::uint64_t len = retained_.size();
  if (len == 0)
    throw std::logic_error("stream: statistics undefined on an empty retained set");
  const double a = static_cast<double>(q_) / static_cast<double>(len);
  return StreamStats{len, q_, a, a / static_cast<double>(len)};
}

std::uint64_t StreamState::rank_of_new(double x) const {
  require_audit("rank_of_new");
  return observed_.count_less(x) + 1;
}

std::uint64_t StreamState::recompute_q() const {
  require_audit("recompute_q");
  std::vector<double> all;
  all.reserve(log_.size());
  for (const auto& [value, kept] : log_) all.push_back(value);
  std::sort(all.begin(), all.end());
  std::uint64_t q = 0;
  for (const auto& [value, kept] : log_) {
    if (!kept) continue;
    q += static_cast<std::uint64_t>(
             std::lower_bound(all.begin(), all.end(), value) - all.begin()) +
         1;
  }
  return q;
}

bool StreamState::top_block_retained() const {
  require_audit("top_block_retained");
  if (n_ == 0) return true;
  const std::uint64_t j = std::min(rule_.cutoff(retained_.size()), n_);
  if (j > retained_.size()) return false;
  // The j best observed are all retained iff the j-th smallest retained value
  // IS the j-th smallest observed value (the retained set is a subset of the
  // observed set, so equal j-th order statistics force the prefixes equal).
  return retained_.kth(j) == observed_.kth(j);
}

const std::vector<std::pair<double, bool>>& StreamState::audit_log() const {
  require_audit("audit_log");
  return log_;
}

void StreamState::require_audit(const char* what) const {
  if (!audit_)
    throw std::logic_error(std::string("stream: ") + what + " requires audit mode");
}

}  // namespace selectsets
