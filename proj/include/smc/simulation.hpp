#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/error.hpp"
#include "smc/rng.hpp"

namespace smc {

/// How the simulator chose its starting history, for run metadata.
struct SimulationStart {
  Word history;
  bool renewal_start = false;
};

/// Starting history: the single symbol "4" when it is a context of its own,
/// otherwise a uniform string of length height(tree) redrawn until it
/// resolves to a context.
inline SimulationStart initial_history(const ProbabilisticContextTree& model, Rng& rng) {
  const auto& alphabet = model.alphabet();
  if (auto four = alphabet.find("4"); four && model.tree().contains(Word{*four}))
    return {Word{*four}, true};
  const std::size_t h = model.tree().height();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Word w(h);
    for (auto& s : w) s = static_cast<Symbol>(rng.below(alphabet.size()));
    if (context_of(model.tree(), w)) return {w, false};
  }
  throw DomainError("could not draw a starting history that resolves to a context");
}

/// Samples n symbols from `model` after discarding `burn_in` symbols. Each
/// symbol is drawn by inverse CDF over the alphabet in index order.
inline SymbolSequence simulate(const ProbabilisticContextTree& model, std::size_t n, std::uint64_t seed,
                               std::size_t burn_in = 1000, SimulationStart* start_out = nullptr) {
  Rng rng(seed);
  SimulationStart start = initial_history(model, rng);
  if (start_out) *start_out = start;

  const auto& tree = model.tree();
  const std::size_t h = tree.height();
  const std::size_t k = model.alphabet().size();
  // History plus emitted symbols; only the last h are ever consulted.
  SymbolSequence buf = start.history;
  buf.reserve(buf.size() + burn_in + n);
  for (std::size_t t = 0; t < burn_in + n; ++t) {
    const std::size_t look = std::min(h, buf.size());
    const std::span<const Symbol> past(buf.data() + buf.size() - look, look);
    const auto ctx = context_of(tree, past);
    if (!ctx) throw DomainError("past " + model.alphabet().format(past) + " resolves to no context");
    const auto& p = model.probs_of(*ctx);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t a = 0;
    for (; a + 1 < k; ++a) {
      acc += p[a];
      if (u < acc) break;
    }
    // Rounding can leave u above the last partial sum; fall back to the
    // last symbol with positive probability.
    while (p[a] == 0.0 && a > 0) --a;
    buf.push_back(static_cast<Symbol>(a));
  }
  return SymbolSequence(buf.end() - static_cast<std::ptrdiff_t>(n), buf.end());
}

/// The 13-context model over {0,1,2,3,4} used in the simulation study.
inline ProbabilisticContextTree make_paper_model() {
  const Alphabet alphabet = Alphabet::digits(5);
  struct Row {
    const char* context;
    std::vector<double> probs;
  };
  const std::vector<Row> rows = {
      {"000", {0.29, 0.71, 0.00, 0.00, 0.00}}, {"100", {0.00, 0.00, 0.67, 0.21, 0.12}},
      {"200", {0.40, 0.60, 0.00, 0.00, 0.00}}, {"300", {0.00, 0.00, 0.67, 0.22, 0.11}},
      {"10", {0.07, 0.00, 0.65, 0.21, 0.07}},  {"20", {0.45, 0.55, 0.00, 0.00, 0.00}},
      {"30", {0.07, 0.00, 0.64, 0.25, 0.04}},  {"001", {0.62, 0.00, 0.27, 0.08, 0.03}},
      {"201", {0.72, 0.00, 0.19, 0.07, 0.02}}, {"21", {0.73, 0.00, 0.18, 0.08, 0.01}},
      {"2", {0.60, 0.40, 0.00, 0.00, 0.00}},   {"3", {0.69, 0.00, 0.21, 0.10, 0.00}},
      {"4", {0.00, 0.00, 0.66, 0.34, 0.00}},
  };
  std::vector<Word> contexts;
  for (const auto& r : rows) contexts.push_back(alphabet.parse_word(r.context));
  ContextTree tree(contexts);
  std::vector<std::vector<double>> probs(rows.size());
  for (const auto& r : rows) probs[*tree.position(alphabet.parse_word(r.context))] = r.probs;
  return ProbabilisticContextTree(alphabet, std::move(tree), std::move(probs));
}

}  // namespace smc
