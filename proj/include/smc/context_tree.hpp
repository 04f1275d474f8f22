#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smc/alphabet.hpp"
#include "smc/error.hpp"

namespace smc {

/// True iff `s` is a suffix of `w` (equality allowed). The empty word is a
/// suffix of every word.
inline bool is_suffix(std::span<const Symbol> s, std::span<const Symbol> w) {
  if (s.size() > w.size()) return false;
  return std::equal(s.begin(), s.end(), w.end() - static_cast<std::ptrdiff_t>(s.size()));
}

inline bool is_proper_suffix(std::span<const Symbol> s, std::span<const Symbol> w) {
  return s.size() < w.size() && is_suffix(s, w);
}

/// A set of contexts. Contexts are kept sorted so that equality is set
/// equality. The root-only tree is the singleton holding the empty word.
///
/// Construction does not check the suffix and irreducibility conditions;
/// use validate_tree() for that.
class ContextTree {
 public:
  ContextTree() : contexts_{Word{}} {}

  explicit ContextTree(std::vector<Word> contexts) : contexts_(std::move(contexts)) {
    std::sort(contexts_.begin(), contexts_.end());
    contexts_.erase(std::unique(contexts_.begin(), contexts_.end()), contexts_.end());
    for (const auto& w : contexts_) height_ = std::max(height_, w.size());
  }

  static ContextTree root() { return ContextTree(); }

  const std::vector<Word>& contexts() const { return contexts_; }
  std::size_t size() const { return contexts_.size(); }

  std::size_t height() const { return height_; }

  bool is_root() const { return contexts_.size() == 1 && contexts_.front().empty(); }

  bool contains(std::span<const Symbol> w) const {
    auto it = std::lower_bound(contexts_.begin(), contexts_.end(), w,
                               [](const Word& a, std::span<const Symbol> b) {
                                 return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                                                     b.end());
                               });
    return it != contexts_.end() && std::equal(it->begin(), it->end(), w.begin(), w.end());
  }

  /// Position of `w` in contexts(), if present.
  std::optional<std::size_t> position(std::span<const Symbol> w) const {
    auto it = std::lower_bound(contexts_.begin(), contexts_.end(), w,
                               [](const Word& a, std::span<const Symbol> b) {
                                 return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                                                     b.end());
                               });
    if (it != contexts_.end() && std::equal(it->begin(), it->end(), w.begin(), w.end()))
      return static_cast<std::size_t>(it - contexts_.begin());
    return std::nullopt;
  }

  friend bool operator==(const ContextTree& a, const ContextTree& b) {
    return a.contexts_ == b.contexts_;
  }

 private:
  std::vector<Word> contexts_;
  std::size_t height_ = 0;
};

enum class TreeOrder { Less, Equal, Greater, Incomparable };

inline const char* to_string(TreeOrder o) {
  switch (o) {
    case TreeOrder::Less: return "Less";
    case TreeOrder::Equal: return "Equal";
    case TreeOrder::Greater: return "Greater";
    case TreeOrder::Incomparable: return "Incomparable";
  }
  return "?";
}

namespace detail {

// smaller ⪯ larger: every context of `larger` has a suffix in `smaller`.
inline bool precedes(const ContextTree& smaller, const ContextTree& larger) {
  for (const auto& v : larger.contexts()) {
    bool found = false;
    for (std::size_t k = 0; k <= v.size() && !found; ++k)
      found = smaller.contains(std::span<const Symbol>(v).last(k));
    if (!found) return false;
  }
  return true;
}

}  // namespace detail

/// Partial order on trees: `a` is Less than `b` when every context of `b`
/// extends some context of `a` and the trees differ.
inline TreeOrder compare_trees(const ContextTree& a, const ContextTree& b) {
  if (a == b) return TreeOrder::Equal;
  const bool le = detail::precedes(a, b);
  const bool ge = detail::precedes(b, a);
  if (le && !ge) return TreeOrder::Less;
  if (ge && !le) return TreeOrder::Greater;
  return TreeOrder::Incomparable;
}

struct TreeViolation {
  enum class Kind { SuffixProperty, Irreducibility, EmptyContext, NoContexts };
  Kind kind;
  Word context;  // offending element
  Word other;    // the suffix it collides with, or the replacement that stays valid
  std::string message(const Alphabet& alphabet) const {
    switch (kind) {
      case Kind::SuffixProperty:
        return "suffix property violated: " + alphabet.format(other) +
               " is a proper suffix of " + alphabet.format(context);
      case Kind::Irreducibility:
        return "irreducibility violated: " + alphabet.format(context) + " can be replaced by " +
               alphabet.format(other);
      case Kind::EmptyContext:
        return "the empty context may only appear in the root-only tree";
      case Kind::NoContexts:
        return "a tree needs at least one context";
    }
    return "invalid tree";
  }
};

/// Returns the first violated tree condition, or nullopt when the set is
/// suffix-free and irreducible.
inline std::optional<TreeViolation> validate_tree(const ContextTree& tree) {
  const auto& ctx = tree.contexts();
  if (ctx.empty()) return TreeViolation{TreeViolation::Kind::NoContexts, {}, {}};
  if (tree.is_root()) return std::nullopt;
  for (const auto& w : ctx)
    if (w.empty()) return TreeViolation{TreeViolation::Kind::EmptyContext, {}, {}};

  for (const auto& w : ctx) {
    for (std::size_t k = 1; k < w.size(); ++k) {
      auto s = std::span<const Symbol>(w).last(k);
      if (tree.contains(s)) return TreeViolation{TreeViolation::Kind::SuffixProperty, w, Word(s.begin(), s.end())};
    }
  }
  // Replacing w by its parent (w minus its oldest symbol) keeps the set
  // suffix-free exactly when no other context extends that parent. If the
  // parent collides, every shorter suffix collides as well.
  std::map<Word, std::size_t> extensions;
  for (const auto& v : ctx)
    for (std::size_t k = 0; k < v.size(); ++k) {
      auto s = std::span<const Symbol>(v).last(k);
      ++extensions[Word(s.begin(), s.end())];
    }
  for (const auto& w : ctx) {
    const auto parent = std::span<const Symbol>(w).last(w.size() - 1);
    const Word key(parent.begin(), parent.end());
    if (extensions[key] < 2)
      return TreeViolation{TreeViolation::Kind::Irreducibility, w, key};
  }
  return std::nullopt;
}

/// The unique context that is a suffix of `past`, or nullopt.
inline std::optional<Word> context_of(const ContextTree& tree, std::span<const Symbol> past) {
  const std::size_t h = std::min(tree.height(), past.size());
  for (std::size_t k = 0; k <= h; ++k) {
    auto s = past.last(k);
    if (tree.contains(s)) return Word(s.begin(), s.end());
  }
  return std::nullopt;
}

/// A context tree with one next-symbol distribution per context.
class ProbabilisticContextTree {
 public:
  static constexpr double kSumTolerance = 1e-12;

  ProbabilisticContextTree(Alphabet alphabet, ContextTree tree, std::vector<std::vector<double>> probs)
      : alphabet_(std::move(alphabet)), tree_(std::move(tree)), probs_(std::move(probs)) {
    if (probs_.size() != tree_.size())
      throw DomainError("expected one probability vector per context");
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      const auto& p = probs_[i];
      const auto name = alphabet_.format(tree_.contexts()[i]);
      if (p.size() != alphabet_.size())
        throw DomainError("probability vector for context " + name + " has wrong length");
      double sum = 0.0;
      for (double v : p) {
        if (!(v >= 0.0)) throw DomainError("negative probability in context " + name);
        sum += v;
      }
      if (std::abs(sum - 1.0) > kSumTolerance)
        throw DomainError("probabilities of context " + name + " do not sum to 1");
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const ContextTree& tree() const { return tree_; }
  const std::vector<std::vector<double>>& probs() const { return probs_; }

  const std::vector<double>& probs_of(std::span<const Symbol> context) const {
    auto pos = tree_.position(context);
    if (!pos) throw DomainError("no such context " + alphabet_.format(context));
    return probs_[*pos];
  }

  friend bool operator==(const ProbabilisticContextTree& a, const ProbabilisticContextTree& b) {
    return a.alphabet_ == b.alphabet_ && a.tree_ == b.tree_ && a.probs_ == b.probs_;
  }

 private:
  Alphabet alphabet_;
  ContextTree tree_;
  std::vector<std::vector<double>> probs_;
};

}  // namespace smc
