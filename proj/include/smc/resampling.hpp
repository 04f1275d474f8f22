#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/count_trie.hpp"
#include "smc/error.hpp"
#include "smc/estimation.hpp"
#include "smc/format.hpp"
#include "smc/rng.hpp"

namespace smc {

/// The sample cut into renewal blocks. Every block ends with the renewal
/// symbol, which occurs nowhere else inside it.
struct BlockStore {
  Symbol renewal = 0;
  std::vector<SymbolSequence> blocks;
  std::size_t discarded = 0;

  std::size_t total_length() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }
};

inline BlockStore split_renewal_blocks(std::span<const Symbol> x, Symbol renewal) {
  if (std::count(x.begin(), x.end(), renewal) < 2) throw DomainError("insufficient renewal points");
  BlockStore store;
  store.renewal = renewal;
  SymbolSequence current;
  for (Symbol s : x) {
    current.push_back(s);
    if (s == renewal) {
      store.blocks.push_back(std::move(current));
      current.clear();
    }
  }
  store.discarded = current.size();
  return store;
}

/// Concatenation of uniformly drawn blocks, truncated to `length`.
inline SymbolSequence resample(const BlockStore& store, std::size_t length, Rng& rng) {
  if (store.blocks.empty()) throw DomainError("no renewal blocks to resample");
  SymbolSequence out;
  out.reserve(length);
  while (out.size() < length) {
    const auto& b = store.blocks[rng.below(store.blocks.size())];
    const std::size_t take = std::min(b.size(), length - out.size());
    out.insert(out.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

/// Quantile by linear interpolation between order statistics (R type 7).
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct BootstrapConfig {
  std::vector<std::size_t> sizes;
  std::size_t resamples = 250;
  std::uint64_t seed = 0;

  void validate(std::size_t depth) const {
    if (sizes.size() < 2) throw DomainError("need at least two resample sizes");
    if (resamples < 2) throw DomainError("need at least two resamples per size");
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      if (sizes[j] <= depth) throw DomainError("resample size must exceed the depth");
      if (j > 0 && sizes[j] <= sizes[j - 1]) throw DomainError("resample sizes must be strictly increasing");
    }
  }
};

/// Quartiles of the B scaled gains for one (pair, size) cell.
struct GainCell {
  std::size_t size = 0;
  std::vector<double> gains;
  double q1 = 0.0, median = 0.0, q3 = 0.0;
};

/// Pair i compares champion trees smaller = i-th smallest and larger =
/// (i+1)-th smallest; gains are [loglik(larger) - loglik(smaller)] / n_j.
struct PairReport {
  std::size_t smaller = 0;  ///< index into ChampionSet::entries
  std::size_t larger = 0;
  std::size_t smaller_leaves = 0;
  std::size_t larger_leaves = 0;
  std::vector<GainCell> cells;  ///< one per size, in size order
};

struct BootstrapReport {
  std::vector<std::size_t> sizes;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  std::vector<PairReport> pairs;
};

inline void fill_quartiles(GainCell& cell) {
  cell.q1 = quantile(cell.gains, 0.25);
  cell.median = quantile(cell.gains, 0.5);
  cell.q3 = quantile(cell.gains, 0.75);
}

/// Runs the renewal-block bootstrap over every adjacent champion pair.
/// Resample (j, b) draws from its own stream Rng::stream(seed, {j, b}), so
/// every cell is reproducible on its own.
inline BootstrapReport bootstrap_deltas(const ChampionSet& champions, const BlockStore& store,
                                        const BootstrapConfig& cfg, std::size_t depth,
                                        std::size_t alphabet_size) {
  if (champions.entries.empty()) throw DomainError("empty champion set");
  cfg.validate(depth);

  BootstrapReport report;
  report.sizes = cfg.sizes;
  report.resamples = cfg.resamples;
  report.seed = cfg.seed;
  report.depth = depth;

  // A pair's gain only involves contexts in the symmetric difference of its
  // two trees; each such context is scored once per resample.
  std::map<Word, std::size_t> context_ids;
  std::vector<Word> contexts;
  auto intern = [&](const Word& w) {
    auto [it, fresh] = context_ids.emplace(w, contexts.size());
    if (fresh) contexts.push_back(w);
    return it->second;
  };
  struct Terms {
    std::vector<std::size_t> plus, minus;
  };
  std::vector<Terms> terms;
  const std::size_t m = champions.entries.size();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    PairReport pr;
    pr.smaller = m - 1 - i;
    pr.larger = m - 2 - i;
    const auto& small = champions.entries[pr.smaller].tree;
    const auto& large = champions.entries[pr.larger].tree;
    pr.smaller_leaves = small.size();
    pr.larger_leaves = large.size();
    Terms t;
    for (const auto& w : large.contexts())
      if (!small.contains(w)) t.plus.push_back(intern(w));
    for (const auto& w : small.contexts())
      if (!large.contains(w)) t.minus.push_back(intern(w));
    terms.push_back(std::move(t));
    for (std::size_t size : cfg.sizes) {
      GainCell cell;
      cell.size = size;
      cell.gains.reserve(cfg.resamples);
      pr.cells.push_back(std::move(cell));
    }
    report.pairs.push_back(std::move(pr));
  }
  if (report.pairs.empty()) return report;

  std::vector<double> ll(contexts.size());
  for (std::size_t j = 0; j < cfg.sizes.size(); ++j) {
    const double scale = 1.0 / static_cast<double>(cfg.sizes[j]);
    for (std::size_t b = 0; b < cfg.resamples; ++b) {
      Rng rng = Rng::stream(cfg.seed, {j, b});
      const auto xs = resample(store, cfg.sizes[j], rng);
      const auto trie = CountTrie::build(xs, alphabet_size, depth);
      for (std::size_t k = 0; k < contexts.size(); ++k) {
        const auto node = trie.find(contexts[k]);
        ll[k] = node == CountTrie::kNone ? 0.0 : node_log_likelihood(trie.next_counts(node), trie.total(node));
      }
      for (std::size_t p = 0; p < report.pairs.size(); ++p) {
        double gain = 0.0;
        for (auto k : terms[p].plus) gain += ll[k];
        for (auto k : terms[p].minus) gain -= ll[k];
        report.pairs[p].cells[j].gains.push_back(gain * scale);
      }
    }
  }
  for (auto& pr : report.pairs)
    for (auto& cell : pr.cells) fill_quartiles(cell);
  return report;
}

/// CSV `pair_index,smaller_leaves,larger_leaves,n_j,q1,median,q3`.
inline std::string bootstrap_csv(const BootstrapReport& report) {
  std::string out = "pair_index,smaller_leaves,larger_leaves,n_j,q1,median,q3\n";
  for (std::size_t p = 0; p < report.pairs.size(); ++p) {
    const auto& pr = report.pairs[p];
    for (const auto& cell : pr.cells)
      out += std::to_string(p) + ',' + std::to_string(pr.smaller_leaves) + ',' +
             std::to_string(pr.larger_leaves) + ',' + std::to_string(cell.size) + ',' +
             format_number(cell.q1) + ',' + format_number(cell.median) + ',' + format_number(cell.q3) +
             '\n';
  }
  return out;
}

enum class ShrinkRule { Residual, Threshold };

inline const char* to_string(ShrinkRule r) { return r == ShrinkRule::Residual ? "residual" : "threshold"; }

struct SelectionParams {
  ShrinkRule rule = ShrinkRule::Residual;
  /// Require every pair above the selected tree to shrink as well.
  bool strict = false;
  /// Threshold rule: Q3 at the largest size must fall below this.
  double epsilon = 1e-3;
};

struct PairDecision {
  double rss_constant = 0.0;  ///< medians ~ beta
  double rss_log_rate = 0.0;  ///< medians ~ b log(n)/n
  double slope = 0.0;         ///< fitted b
  bool shrinks = false;
};

struct Selection {
  std::size_t index = 0;  ///< into ChampionSet::entries
  ContextTree tree;
  bool warning = false;   ///< no pair shrank; the largest champion was returned
  std::vector<PairDecision> pairs;
};

/// Least-squares comparison of a constant fit against b log(n)/n for the
/// medians of one pair.
inline PairDecision residual_test(std::span<const std::size_t> sizes, std::span<const double> medians) {
  PairDecision d;
  const auto r = static_cast<double>(medians.size());
  double mean = 0.0;
  for (double m : medians) mean += m;
  mean /= r;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < medians.size(); ++j) {
    const double n = static_cast<double>(sizes[j]);
    const double xj = std::log(n) / n;
    sxx += xj * xj;
    sxy += xj * medians[j];
  }
  d.slope = sxy / sxx;
  for (std::size_t j = 0; j < medians.size(); ++j) {
    const double n = static_cast<double>(sizes[j]);
    d.rss_constant += (medians[j] - mean) * (medians[j] - mean);
    const double e = medians[j] - d.slope * std::log(n) / n;
    d.rss_log_rate += e * e;
  }
  d.shrinks = d.rss_log_rate < d.rss_constant;
  return d;
}

/// Picks the smallest champion whose gain towards the next larger champion
/// vanishes as the resample size grows.
inline Selection smc_select(const ChampionSet& champions, const BootstrapReport& report,
                            const SelectionParams& params = {}) {
  if (champions.entries.empty()) throw DomainError("empty champion set");
  const std::size_t m = champions.entries.size();
  if (report.pairs.size() != m - 1) throw DomainError("bootstrap report does not match the champion set");

  Selection sel;
  for (const auto& pr : report.pairs) {
    std::vector<double> medians, q3;
    for (const auto& cell : pr.cells) {
      medians.push_back(cell.median);
      q3.push_back(cell.q3);
    }
    PairDecision d = residual_test(report.sizes, medians);
    if (params.rule == ShrinkRule::Threshold) {
      bool falling = true;
      for (std::size_t j = 1; j < q3.size(); ++j) falling = falling && q3[j] <= q3[j - 1];
      d.shrinks = !q3.empty() && q3.back() < params.epsilon && falling;
    }
    sel.pairs.push_back(d);
  }

  // Pair i sits between the i-th and (i+1)-th smallest champions; the
  // largest champion has no pair above it and counts as shrinking.
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < m; ++i) {
    const bool here = i + 1 == m ? params.strict || m == 1 : sel.pairs[i].shrinks;
    if (!here) continue;
    bool above = true;
    if (params.strict)
      for (std::size_t k = i + 1; k + 1 < m; ++k) above = above && sel.pairs[k].shrinks;
    if (above) {
      chosen = i;
      break;
    }
  }
  if (!chosen) {
    sel.warning = true;
    chosen = m - 1;
  }
  sel.index = m - 1 - *chosen;
  sel.tree = champions.entries[sel.index].tree;
  return sel;
}

}  // namespace smc
