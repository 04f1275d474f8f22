#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/count_trie.hpp"
#include "smc/error.hpp"
#include "smc/format.hpp"
#include "smc/incidence.hpp"

namespace smc {

/// Relative tolerance below which two penalized scores or likelihoods count
/// as tied. Ties resolve toward the smaller tree.
inline constexpr double kTieTolerance = 1e-12;

inline bool exceeds(double a, double b) {
  return a - b > kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// log L of `tree` on the sample behind `trie`: sum over contexts w and
/// symbols a of N(wa) log p(a|w).
inline double log_likelihood(const ContextTree& tree, const CountTrie& trie) {
  double ll = 0.0;
  for (const auto& w : tree.contexts()) {
    if (w.size() > trie.depth())
      throw DomainError("context of length " + std::to_string(w.size()) +
                        " exceeds the count depth " + std::to_string(trie.depth()));
    const auto node = trie.find(w);
    if (node == CountTrie::kNone || trie.total(node) == 0) {
      std::string name;
      for (Symbol s : w) name += (name.empty() ? "" : " ") + std::to_string(s);
      throw DomainError("unobserved context [" + name + "]");
    }
    ll += node_log_likelihood(trie.next_counts(node), trie.total(node));
  }
  return ll;
}

/// Same as log_likelihood but unobserved contexts contribute nothing. Used on
/// bootstrap resamples, which may miss rare contexts.
inline double log_likelihood_lenient(const ContextTree& tree, const CountTrie& trie) {
  double ll = 0.0;
  for (const auto& w : tree.contexts()) {
    const auto node = trie.find(w);
    if (node != CountTrie::kNone) ll += node_log_likelihood(trie.next_counts(node), trie.total(node));
  }
  return ll;
}

/// Attaches the maximum likelihood transition vectors to every context.
inline ProbabilisticContextTree fit_pct(const ContextTree& tree, const CountTrie& trie,
                                        const Alphabet& alphabet) {
  std::vector<std::vector<double>> probs;
  probs.reserve(tree.size());
  for (const auto& w : tree.contexts()) {
    try {
      probs.push_back(mle(trie, w));
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " " + alphabet.format(w));
    }
  }
  return ProbabilisticContextTree(alphabet, tree, std::move(probs));
}

/// A tree chosen by the BIC program, with its likelihood and dimension.
struct BicFit {
  ContextTree tree;
  double log_likelihood = 0.0;
  long df = 0;
};

/// Context tree maximizing over a count trie.
///
/// Each node w carries its log-likelihood and df(w) under the incidence
/// rule. For a penalty constant c the node's own score is
///   s_w = loglik_w - c * df(w) * log n.
/// Bottom-up, a node at depth d keeps s_w; above that the node is split
/// into its observed children only when the children's best total strictly
/// exceeds s_w (ties prune). The program stays inside the irreducible
/// trees: a node with one observed child may only be split if that child is
/// split too, otherwise the child would be a lone leaf.
///
/// Holds a reference to the trie, which must outlive it.
class PenalizedTrie {
 public:
  using NodeId = CountTrie::NodeId;

  PenalizedTrie(const CountTrie& trie, const IncidenceRule& rule, DofMode mode)
      : trie_(&trie), log_n_(std::log(static_cast<double>(trie.sample_size()))) {
    const std::size_t k = trie.alphabet_size();
    loglik_.resize(trie.node_count());
    dof_.resize(trie.node_count());
    children_.resize(trie.node_count());
    // Iterative DFS that records node words for df(w) and a post-order.
    struct Frame {
      NodeId node;
      std::size_t next_child;
    };
    Word past;
    std::vector<Frame> stack{{CountTrie::root(), 0}};
    visit(CountTrie::root(), past, rule, mode);
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next_child < k) {
        const auto a = static_cast<Symbol>(top.next_child++);
        const NodeId c = trie.child(top.node, a);
        if (c == CountTrie::kNone) continue;
        children_[top.node].push_back({c, a});
        past.insert(past.begin(), a);
        visit(c, past, rule, mode);
        stack.push_back({c, 0});
      } else {
        postorder_.push_back(top.node);
        stack.pop_back();
        if (!past.empty()) past.erase(past.begin());
      }
    }
  }

  const CountTrie& trie() const { return *trie_; }
  double log_n() const { return log_n_; }
  double node_log_likelihood(NodeId node) const { return loglik_[node]; }
  long node_dof(NodeId node) const { return dof_[node]; }

  /// The BIC tree for penalty constant c > 0.
  BicFit fit(double c) const {
    const std::size_t nodes = trie_->node_count();
    std::vector<double> value(nodes), split(nodes);
    std::vector<char> expand(nodes, 0);
    constexpr double kNever = -std::numeric_limits<double>::infinity();
    const double penalty = c * log_n_;

    for (NodeId u : postorder_) {
      const double own = loglik_[u] - penalty * static_cast<double>(dof_[u]);
      const auto& kids = children_[u];
      double alt = kNever;
      if (trie_->node_depth(u) < trie_->depth() && !kids.empty()) {
        if (kids.size() == 1) {
          alt = split[kids.front().node];
        } else {
          alt = 0.0;
          for (const auto& ch : kids) alt += value[ch.node];
        }
      }
      split[u] = alt;
      expand[u] = (alt != kNever && exceeds(alt, own)) ? 1 : 0;
      value[u] = expand[u] ? alt : own;
    }

    BicFit out;
    std::vector<Word> leaves;
    Word past;
    std::function<void(NodeId, bool)> walk = [&](NodeId u, bool forced) {
      if (!(forced || expand[u])) {
        leaves.push_back(past);
        out.log_likelihood += loglik_[u];
        out.df += dof_[u];
        return;
      }
      const auto& kids = children_[u];
      const bool lone = kids.size() == 1;
      for (const auto& ch : kids) {
        past.insert(past.begin(), ch.symbol);
        walk(ch.node, lone);
        past.erase(past.begin());
      }
    };
    walk(CountTrie::root(), false);
    out.tree = ContextTree(std::move(leaves));
    return out;
  }

 private:
  void visit(NodeId node, const Word& past, const IncidenceRule& rule, DofMode mode) {
    loglik_[node] = smc::node_log_likelihood(trie_->next_counts(node), trie_->total(node));
    dof_[node] = smc::node_dof(rule, mode, past, trie_->alphabet_size());
  }

  const CountTrie* trie_;
  double log_n_;
  std::vector<double> loglik_;
  std::vector<long> dof_;
  struct Edge {
    NodeId node;
    Symbol symbol;
  };
  std::vector<std::vector<Edge>> children_;
  std::vector<NodeId> postorder_;
};

/// argmax over admissible trees of log L - c * df * log n.
inline ContextTree bic_estimate(const CountTrie& trie, double c, const IncidenceRule& rule,
                                DofMode mode) {
  if (!(c > 0.0)) throw DomainError("penalty constant must be positive");
  return PenalizedTrie(trie, rule, mode).fit(c).tree;
}

/// One champion tree and the penalty interval [c_lo, c_hi) on which it is
/// the BIC tree.
struct Champion {
  ContextTree tree;
  double log_likelihood = 0.0;
  long df = 0;
  double c_lo = 0.0;
  double c_hi = std::numeric_limits<double>::infinity();
  std::size_t leaves() const { return tree.size(); }
};

/// Champion trees ordered by increasing penalty constant: the first entry is
/// the largest tree, the last is (for monotone df) the root-only tree.
struct ChampionSet {
  std::vector<Champion> entries;
  std::size_t sample_size = 0;
  std::size_t depth = 0;
  std::string rule;
  DofMode mode = DofMode::PaperSum;

  std::size_t size() const { return entries.size(); }

  /// Index of the entry whose tree equals `tree`, if any.
  std::optional<std::size_t> find(const ContextTree& tree) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].tree == tree) return i;
    return std::nullopt;
  }
};

namespace detail {

struct Boundary {
  double c;
  BicFit fit;
};

inline void split_interval(const PenalizedTrie& pt, double lo, const BicFit& a, double hi,
                           const BicFit& b, std::vector<Boundary>& out, int guard = 0) {
  // Crossing point of the two penalized scores as functions of c.
  const double ddf = static_cast<double>(a.df - b.df);
  double c = ddf > 0 ? (a.log_likelihood - b.log_likelihood) / (ddf * pt.log_n()) : lo;
  const bool crossing = c > lo && c < hi;
  if (!crossing) c = std::sqrt(std::max(lo, 1e-300) * hi);
  if (guard > 2000 || !(hi > lo * (1 + 1e-14))) {
    out.push_back({hi, b});
    return;
  }
  BicFit mid = pt.fit(c);
  if (mid.tree == a.tree || mid.tree == b.tree) {
    if (crossing) {
      out.push_back({c, b});
    } else if (mid.tree == a.tree) {
      split_interval(pt, c, a, hi, b, out, guard + 1);
    } else {
      split_interval(pt, lo, a, c, b, out, guard + 1);
    }
    return;
  }
  split_interval(pt, lo, a, c, mid, out, guard + 1);
  split_interval(pt, c, mid, hi, b, out, guard + 1);
}

}  // namespace detail

/// Every tree the BIC program returns as c ranges over (0, inf), found by
/// recursive splitting of the penalty range at the crossing points of
/// neighbouring trees.
inline ChampionSet champion_set(const CountTrie& trie, const IncidenceRule& rule, DofMode mode,
                                const std::string& rule_name = "") {
  PenalizedTrie pt(trie, rule, mode);
  constexpr double kLowest = 1e-12;
  BicFit top = pt.fit(kLowest);
  const double root_ll = pt.node_log_likelihood(CountTrie::root());
  const double c_high = (top.log_likelihood - root_ll) / pt.log_n() + 1.0;
  BicFit bottom = pt.fit(c_high);

  std::vector<detail::Boundary> bounds;
  if (!(top.tree == bottom.tree)) detail::split_interval(pt, kLowest, top, c_high, bottom, bounds);

  ChampionSet out;
  out.sample_size = trie.sample_size();
  out.depth = trie.depth();
  out.rule = rule_name;
  out.mode = mode;
  out.entries.push_back({std::move(top.tree), top.log_likelihood, top.df, 0.0,
                         std::numeric_limits<double>::infinity()});
  for (auto& bnd : bounds) {
    out.entries.back().c_hi = bnd.c;
    out.entries.push_back({std::move(bnd.fit.tree), bnd.fit.log_likelihood, bnd.fit.df, bnd.c,
                           std::numeric_limits<double>::infinity()});
  }
  // Trees that only win at a single constant lie on a line between their
  // neighbours; they own no interval and are not champions.
  std::vector<Champion> kept;
  for (auto& e : out.entries) {
    if (!kept.empty() && !(e.c_hi > e.c_lo * (1 + kTieTolerance))) {
      continue;
    }
    if (!kept.empty() && kept.back().c_hi < e.c_lo) e.c_lo = kept.back().c_hi;
    kept.push_back(std::move(e));
  }
  for (std::size_t i = 1; i < kept.size(); ++i) kept[i].c_lo = kept[i - 1].c_hi;
  out.entries = std::move(kept);
  return out;
}

/// Structured text form: one record per champion.
inline std::string serialize_champions(const ChampionSet& set, const Alphabet& alphabet) {
  nlohmann::json doc;
  doc["alphabet"] = alphabet.tokens();
  doc["sample_size"] = set.sample_size;
  doc["depth"] = set.depth;
  doc["rule"] = set.rule;
  doc["dof_mode"] = to_string(set.mode);
  auto list = nlohmann::json::array();
  for (const auto& e : set.entries) {
    nlohmann::json rec;
    rec["leaves"] = e.leaves();
    rec["df"] = e.df;
    rec["log_likelihood"] = e.log_likelihood;
    rec["c_lo"] = e.c_lo;
    rec["c_hi"] = std::isinf(e.c_hi) ? nlohmann::json(nullptr) : nlohmann::json(e.c_hi);
    auto contexts = nlohmann::json::array();
    for (const auto& w : e.tree.contexts()) {
      auto tokens = nlohmann::json::array();
      for (Symbol s : w) tokens.push_back(alphabet.token(s));
      contexts.push_back(std::move(tokens));
    }
    rec["contexts"] = std::move(contexts);
    list.push_back(std::move(rec));
  }
  doc["champions"] = std::move(list);
  return doc.dump(2) + "\n";
}

/// CSV projection `leaves,df,loglik,c_lo,c_hi`, one row per champion in
/// increasing order of c.
inline std::string champions_csv(const ChampionSet& set) {
  std::string out = "leaves,df,loglik,c_lo,c_hi\n";
  for (const auto& e : set.entries) {
    out += std::to_string(e.leaves()) + ',' + std::to_string(e.df) + ',' +
           format_number(e.log_likelihood) + ',' + format_number(e.c_lo) + ',' +
           format_number(e.c_hi) + '\n';
  }
  return out;
}

}  // namespace smc
