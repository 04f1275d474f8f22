// Simulates the 13-context rhythm model, lists its champion trees and picks
// one with the renewal-block bootstrap.

#include <iostream>

#include "smc/smc.hpp"

int main() {
  using namespace smc;
  const auto model = make_paper_model();
  const auto x = simulate(model, 40000, 7);
  const std::size_t d = 6;
  const auto trie = CountTrie::build(x, model.alphabet().size(), d);
  const auto set = champion_set(trie, IncidenceRule::full(), DofMode::PaperSum, "full");

  std::cout << set.size() << " champion trees; the ten smallest:\n";
  for (std::size_t i = set.size() > 10 ? set.size() - 10 : 0; i < set.size(); ++i) {
    const auto& e = set.entries[i];
    std::cout << "  " << e.leaves() << " leaves  df " << e.df << "  loglik " << format_number(e.log_likelihood)
              << "  c in [" << format_number(e.c_lo) << ", " << format_number(e.c_hi) << ")\n";
  }

  const auto blocks = split_renewal_blocks(x, *model.alphabet().find("4"));
  BootstrapConfig cfg{{5000, 10000, 20000, 30000}, 100, 7};
  const auto report = bootstrap_deltas(set, blocks, cfg, d, model.alphabet().size());
  const auto sel = smc_select(set, report);

  std::cout << "\nselected " << sel.tree.size() << " contexts:";
  for (const auto& w : sel.tree.contexts()) std::cout << ' ' << model.alphabet().format(w);
  std::cout << (sel.tree == model.tree() ? "\n(the generating tree)\n" : "\n");
  return 0;
}
