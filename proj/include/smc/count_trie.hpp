#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smc/alphabet.hpp"
#include "smc/error.hpp"

namespace smc {

using Count = std::uint64_t;

/// Occurrence counts N(w) for every string of length 1..d+1, where all
/// counted windows end at positions t = d+1..n of the sample.
///
/// A node represents a past string w with 0 <= |w| <= d and stores the
/// next-symbol counts N(wb). Children extend w one symbol further into the
/// past, so node(aw) is the child of node(w) under `a`. Only strings with
/// N(w.) = sum_b N(wb) > 0 are materialized.
class CountTrie {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  static CountTrie build(std::span<const Symbol> x, std::size_t alphabet_size, std::size_t depth) {
    if (depth < 1) throw DomainError("count depth must be at least 1");
    if (alphabet_size < 1) throw DomainError("alphabet must be non-empty");
    if (x.size() < depth + 1) throw DomainError("sample too short");
    CountTrie trie(alphabet_size, depth, x.size());
    for (std::size_t t = depth; t < x.size(); ++t) {  // 0-based window ends d..n-1
      const Symbol next = x[t];
      NodeId node = 0;
      trie.bump(node, next);
      for (std::size_t k = 1; k <= depth; ++k) {
        node = trie.child_or_insert(node, x[t - k]);
        trie.bump(node, next);
      }
    }
    return trie;
  }

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t depth() const { return depth_; }
  std::size_t sample_size() const { return sample_size_; }
  /// Number of counted windows, n - d.
  Count windows() const { return sample_size_ - depth_; }
  std::size_t node_count() const { return depth_of_.size(); }

  static constexpr NodeId root() { return 0; }

  NodeId child(NodeId node, Symbol older) const {
    return children_[static_cast<std::size_t>(node) * alphabet_size_ + older];
  }
  std::span<const Count> next_counts(NodeId node) const {
    return {counts_.data() + static_cast<std::size_t>(node) * alphabet_size_, alphabet_size_};
  }
  Count total(NodeId node) const { return totals_[node]; }
  std::size_t node_depth(NodeId node) const { return depth_of_[node]; }

  /// Node for past string `w` (oldest first), kNone when unobserved or too long.
  NodeId find(std::span<const Symbol> w) const {
    if (w.size() > depth_) return kNone;
    NodeId node = 0;
    for (auto it = w.rbegin(); it != w.rend() && node != kNone; ++it) {
      if (*it >= alphabet_size_) return kNone;
      node = child(node, *it);
    }
    return node;
  }

  /// N(w) for 1 <= |w| <= d+1.
  Count count(std::span<const Symbol> w) const {
    if (w.empty() || w.size() > depth_ + 1) throw DomainError("count defined for lengths 1..d+1");
    const NodeId node = find(w.first(w.size() - 1));
    return node == kNone ? 0 : next_counts(node)[w.back()];
  }

  /// N(w.) = sum_b N(wb) for |w| <= d.
  Count context_total(std::span<const Symbol> w) const {
    const NodeId node = find(w);
    return node == kNone ? 0 : total(node);
  }

  /// Every observed string of length 1..d+1 with its count, sorted.
  std::vector<std::pair<Word, Count>> entries() const {
    std::vector<std::pair<Word, Count>> out;
    Word past;
    collect(root(), past, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Debug dump, one "<string>\t<count>" line per observed string, sorted by
  /// the rendered string.
  void dump(std::ostream& os, const Alphabet& alphabet) const {
    std::vector<std::pair<std::string, Count>> lines;
    for (const auto& [w, n] : entries()) lines.emplace_back(alphabet.format(w), n);
    std::sort(lines.begin(), lines.end());
    for (const auto& [s, n] : lines) os << s << '\t' << n << '\n';
  }

 private:
  CountTrie(std::size_t alphabet_size, std::size_t depth, std::size_t n)
      : alphabet_size_(alphabet_size), depth_(depth), sample_size_(n) {
    add_node(0);
  }

  NodeId add_node(std::size_t depth) {
    const auto id = static_cast<NodeId>(depth_of_.size());
    children_.resize(children_.size() + alphabet_size_, kNone);
    counts_.resize(counts_.size() + alphabet_size_, 0);
    totals_.push_back(0);
    depth_of_.push_back(static_cast<std::uint16_t>(depth));
    return id;
  }

  NodeId child_or_insert(NodeId node, Symbol older) {
    const std::size_t slot = static_cast<std::size_t>(node) * alphabet_size_ + older;
    if (children_[slot] == kNone) {
      const NodeId id = add_node(depth_of_[node] + 1u);
      children_[slot] = id;
    }
    return children_[slot];
  }

  void bump(NodeId node, Symbol next) {
    ++counts_[static_cast<std::size_t>(node) * alphabet_size_ + next];
    ++totals_[node];
  }

  void collect(NodeId node, Word& past, std::vector<std::pair<Word, Count>>& out) const {
    const auto counts = next_counts(node);
    for (std::size_t b = 0; b < alphabet_size_; ++b) {
      if (counts[b] == 0) continue;
      Word w = past;
      w.push_back(static_cast<Symbol>(b));
      out.emplace_back(std::move(w), counts[b]);
    }
    for (std::size_t a = 0; a < alphabet_size_; ++a) {
      const NodeId c = child(node, static_cast<Symbol>(a));
      if (c == kNone) continue;
      past.insert(past.begin(), static_cast<Symbol>(a));
      collect(c, past, out);
      past.erase(past.begin());
    }
  }

  std::size_t alphabet_size_;
  std::size_t depth_;
  std::size_t sample_size_;
  std::vector<NodeId> children_;
  std::vector<Count> counts_;
  std::vector<Count> totals_;
  std::vector<std::uint16_t> depth_of_;
};

/// Maximum likelihood next-symbol distribution N(wa) / sum_b N(wb).
inline std::vector<double> mle(const CountTrie& trie, std::span<const Symbol> w) {
  if (w.size() > trie.depth()) throw DomainError("context longer than the count depth");
  const auto node = trie.find(w);
  if (node == CountTrie::kNone || trie.total(node) == 0) throw DomainError("unobserved context");
  const auto counts = trie.next_counts(node);
  const double total = static_cast<double>(trie.total(node));
  std::vector<double> p(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) p[a] = static_cast<double>(counts[a]) / total;
  return p;
}

/// sum_a N(wa) log(N(wa)/N(w.)) for one node, with 0 log 0 = 0.
inline double node_log_likelihood(std::span<const Count> counts, Count total) {
  double ll = 0.0;
  const double t = static_cast<double>(total);
  for (Count c : counts)
    if (c > 0) ll += static_cast<double>(c) * std::log(static_cast<double>(c) / t);
  return ll;
}

}  // namespace smc
