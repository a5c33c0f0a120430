#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "selectsets/rng.hpp"

namespace selectsets {

// Order-statistic set of distinct doubles: insert, rank-below count, and
// k-th smallest selection, each O(log size) expected. A size-augmented treap
// whose heap priorities are a hash of the key bits, so the tree shape is a
// pure function of the key set — no RNG state, and identical across runs.
// Nodes live in a flat vector (the stream never erases), which keeps the
// structure trivially copyable and cache-friendly.
class OrderTree {
 public:
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  void clear() {
    nodes_.clear();
    root_ = -1;
  }

  bool contains(double key) const {
    int t = root_;
    while (t >= 0) {
      if (key == nodes_[t].key) return true;
      t = key < nodes_[t].key ? nodes_[t].left : nodes_[t].right;
    }
    return false;
  }

  // Number of keys strictly below `key`; sets `found` if `key` itself is present.
  std::size_t count_less(double key, bool* found = nullptr) const {
    if (found) *found = false;
    std::size_t below = 0;
    int t = root_;
    while (t >= 0) {
      const Node& n = nodes_[t];
      if (key == n.key) {
        if (found) *found = true;
        return below + subtree_size(n.left);
      }
      if (key < n.key) {
        t = n.left;
      } else {
        below += subtree_size(n.left) + 1;
        t = n.right;
      }
    }
    return below;
  }

  // k-th smallest key, 1-based. Pre: 1 <= k <= size().
  double kth(std::size_t k) const {
    int t = root_;
    while (t >= 0) {
      const Node& n = nodes_[t];
      const std::size_t left = subtree_size(n.left);
      if (k == left + 1) return n.key;
      if (k <= left) {
        t = n.left;
      } else {
        k -= left + 1;
        t = n.right;
      }
    }
    return 0.0;  // unreachable for valid k
  }

  // Returns false (and changes nothing) if the key is already present.
  bool insert(double key) {
    if (contains(key)) return false;
    const int nd = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{key, mix64(std::bit_cast<std::uint64_t>(key)), -1, -1, 1});
    root_ = insert_at(root_, nd);
    return true;
  }

  // Keys in ascending order.
  std::vector<double> sorted() const {
    std::vector<double> out;
    out.reserve(nodes_.size());
    append_inorder(root_, out);
    return out;
  }

 private:
  struct Node {
    double key;
    std::uint64_t prio;
    int left;
    int right;
    std::uint32_t size;
  };

  std::uint32_t subtree_size(int t) const { return t < 0 ? 0 : nodes_[t].size; }

  void pull(int t) {
    nodes_[t].size = 1 + subtree_size(nodes_[t].left) + subtree_size(nodes_[t].right);
  }

  // Splits subtree t into keys < key (into l) and keys > key (into r).
  void split(int t, double key, int& l, int& r) {
    if (t < 0) {
      l = r = -1;
      return;
    }
    if (nodes_[t].key < key) {
      split(nodes_[t].right, key, nodes_[t].right, r);
      l = t;
    } else {
      split(nodes_[t].left, key, l, nodes_[t].left);
      r = t;
    }
    pull(t);
  }

  int insert_at(int t, int nd) {
    if (t < 0) return nd;
    if (nodes_[nd].prio > nodes_[t].prio) {
      split(t, nodes_[nd].key, nodes_[nd].left, nodes_[nd].right);
      pull(nd);
      return nd;
    }
    if (nodes_[nd].key < nodes_[t].key)
      nodes_[t].left = insert_at(nodes_[t].left, nd);
    else
      nodes_[t].right = insert_at(nodes_[t].right, nd);
    pull(t);
    return t;
  }

  void append_inorder(int t, std::vector<double>& out) const {
    if (t < 0) return;
    append_inorder(nodes_[t].left, out);
    out.push_back(nodes_[t].key);
    append_inorder(nodes_[t].right, out);
  }

  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace selectsets
