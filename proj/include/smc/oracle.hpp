#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/error.hpp"
#include "smc/estimation.hpp"
#include "smc/incidence.hpp"

namespace smc {

struct BruteForceOptions {
  /// Refuse instances with more admissible-tree candidates than this.
  std::size_t max_trees = 1'000'000;
};

/// Output of the exhaustive search.
struct BruteForceResult {
  /// The trees that are the BIC tree on a non-empty penalty interval, in the
  /// ChampionSet layout.
  ChampionSet champions;
  /// Per-df likelihood maximizers surviving the strict-likelihood filter,
  /// ordered by df. Contains `champions` and possibly trees strictly inside
  /// the concave hull of (df, loglik) that no penalty constant selects.
  std::vector<Champion> per_df;
  std::size_t trees_enumerated = 0;
};

/// Exhaustive champion search. Counts are taken by rescanning the sample,
/// every complete tree of height <= d is listed and filtered for
/// irreducibility, trees are grouped by df, and the BIC intervals are read
/// off by comparing every pair of per-df maximizers directly. Shares nothing
/// with the trie/dynamic-programming path except log and df conventions.
inline BruteForceResult brute_force_search(std::span<const Symbol> x, std::size_t alphabet_size,
                                           std::size_t d, const IncidenceRule& rule, DofMode mode,
                                           const BruteForceOptions& opts = {}) {
  if (d < 1 || x.size() < d + 1) throw DomainError("sample too short");
  const std::size_t n = x.size();

  // next-symbol counts for every observed past of length 0..d
  std::map<Word, std::vector<Count>> counts;
  for (std::size_t t = d; t < n; ++t)
    for (std::size_t k = 0; k <= d; ++k) {
      Word past(x.begin() + static_cast<std::ptrdiff_t>(t - k), x.begin() + static_cast<std::ptrdiff_t>(t));
      auto& v = counts[past];
      if (v.empty()) v.assign(alphabet_size, 0);
      ++v[x[t]];
    }
  auto observed_children = [&](const Word& w) {
    std::vector<Word> out;
    if (w.size() >= d) return out;
    for (std::size_t a = 0; a < alphabet_size; ++a) {
      Word aw(w.size() + 1);
      aw[0] = static_cast<Symbol>(a);
      std::copy(w.begin(), w.end(), aw.begin() + 1);
      if (counts.count(aw)) out.push_back(std::move(aw));
    }
    return out;
  };

  // Number of complete trees below w, saturating.
  const std::size_t cap = opts.max_trees + 1;
  std::map<Word, std::size_t> sizes;
  std::function<std::size_t(const Word&)> how_many = [&](const Word& w) -> std::size_t {
    if (auto it = sizes.find(w); it != sizes.end()) return it->second;
    std::size_t prod = 1;
    for (const auto& c : observed_children(w)) prod = std::min(cap, prod * how_many(c));
    const auto kids = observed_children(w);
    const std::size_t total = kids.empty() ? 1 : std::min(cap, 1 + prod);
    sizes[w] = total;
    return total;
  };
  if (how_many(Word{}) > opts.max_trees) throw DomainError("instance too large for brute force");

  std::function<std::vector<std::vector<Word>>(const Word&)> complete_trees =
      [&](const Word& w) -> std::vector<std::vector<Word>> {
    std::vector<std::vector<Word>> out{{w}};
    const auto kids = observed_children(w);
    if (kids.empty()) return out;
    std::vector<std::vector<Word>> partial{{}};
    for (const auto& c : kids) {
      const auto sub = complete_trees(c);
      std::vector<std::vector<Word>> next;
      for (const auto& p : partial)
        for (const auto& s : sub) {
          auto merged = p;
          merged.insert(merged.end(), s.begin(), s.end());
          next.push_back(std::move(merged));
        }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
    return out;
  };

  auto context_ll = [&](const Word& w) {
    const auto& v = counts.at(w);
    Count total = 0;
    for (Count c : v) total += c;
    double ll = 0.0;
    for (Count c : v)
      if (c > 0) ll += static_cast<double>(c) * std::log(static_cast<double>(c) / static_cast<double>(total));
    return ll;
  };

  BruteForceResult result;
  std::map<long, Champion> best;
  for (auto& leaves : complete_trees(Word{})) {
    ContextTree tree(leaves);
    if (validate_tree(tree)) continue;
    ++result.trees_enumerated;
    double ll = 0.0;
    for (const auto& w : tree.contexts()) ll += context_ll(w);
    const long df = df_tree(tree, rule, mode, alphabet_size);
    auto it = best.find(df);
    if (it == best.end() || exceeds(ll, it->second.log_likelihood) ||
        (!exceeds(it->second.log_likelihood, ll) &&
         std::make_pair(tree.size(), tree.contexts()) <
             std::make_pair(it->second.tree.size(), it->second.tree.contexts()))) {
      best[df] = Champion{std::move(tree), ll, df, 0.0, 0.0};
    }
  }

  // Keep g only if every smaller df has strictly smaller likelihood.
  double running = -std::numeric_limits<double>::infinity();
  for (auto& [g, champ] : best) {
    if (result.per_df.empty() || exceeds(champ.log_likelihood, running)) {
      result.per_df.push_back(champ);
      running = champ.log_likelihood;
    }
  }

  // c is won by g iff loglik_g - c g log n beats every smaller df strictly
  // and ties-or-beats every larger df.
  const double log_n = std::log(static_cast<double>(n));
  auto rate = [&](const Champion& small, const Champion& large) {
    return (large.log_likelihood - small.log_likelihood) /
           (static_cast<double>(large.df - small.df) * log_n);
  };
  std::vector<Champion> path;
  for (std::size_t i = 0; i < result.per_df.size(); ++i) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < result.per_df.size(); ++j) {
      if (j < i) hi = std::min(hi, rate(result.per_df[j], result.per_df[i]));
      if (j > i) lo = std::max(lo, rate(result.per_df[i], result.per_df[j]));
    }
    if (hi > lo * (1 + kTieTolerance) && hi > 0) {
      Champion c = result.per_df[i];
      c.c_lo = lo;
      c.c_hi = hi;
      path.push_back(std::move(c));
    }
  }
  std::reverse(path.begin(), path.end());  // increasing c
  if (!path.empty()) path.front().c_lo = 0.0;

  result.champions.entries = std::move(path);
  result.champions.sample_size = n;
  result.champions.depth = d;
  result.champions.mode = mode;
  return result;
}

/// Champion set by exhaustive enumeration; the independent check for
/// champion_set() on small instances.
inline ChampionSet brute_force_champions(std::span<const Symbol> x, std::size_t alphabet_size,
                                         std::size_t d, const IncidenceRule& rule, DofMode mode,
                                         const BruteForceOptions& opts = {}) {
  return brute_force_search(x, alphabet_size, d, rule, mode, opts).champions;
}

}  // namespace smc
