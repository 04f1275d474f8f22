#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace smc;
using namespace smc::testing;

namespace {

const SymbolSequence kAlternating = seq("0101010101");

double penalized(const Champion& c, double cst, std::size_t n) {
  return c.log_likelihood - cst * static_cast<double>(c.df) * std::log(static_cast<double>(n));
}

// `root_df` >= 0 allows a restricted rule under which a refinement of the
// root costs no more parameters than the root itself; the root then never
// wins and the last champion is that refinement.
void expect_set_invariants(const ChampionSet& set, long root_df = -1) {
  ASSERT_FALSE(set.entries.empty());
  EXPECT_EQ(set.entries.front().c_lo, 0.0);
  EXPECT_TRUE(std::isinf(set.entries.back().c_hi));
  if (root_df < 0 || set.entries.back().tree.is_root())
    EXPECT_TRUE(set.entries.back().tree.is_root());
  else
    EXPECT_LE(set.entries.back().df, root_df);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& e = set.entries[i];
    EXPECT_FALSE(validate_tree(e.tree));
    EXPECT_LT(e.c_lo, e.c_hi);
    if (i + 1 == set.size()) continue;
    const auto& next = set.entries[i + 1];
    EXPECT_EQ(e.c_hi, next.c_lo);
    EXPECT_GT(e.df, next.df);
    EXPECT_GT(e.log_likelihood, next.log_likelihood);
    EXPECT_EQ(compare_trees(e.tree, next.tree), TreeOrder::Greater);
  }
}

}  // namespace

TEST(LogLikelihood, AlternatingSample) {
  const auto trie = CountTrie::build(kAlternating, 2, 2);
  EXPECT_EQ(log_likelihood(tree({"0", "1"}, binary()), trie), 0.0);
  EXPECT_NEAR(log_likelihood(ContextTree::root(), trie), 8 * std::log(0.5), 1e-12);
  EXPECT_NEAR(log_likelihood(ContextTree::root(), trie), -5.5452, 1e-4);
}

TEST(LogLikelihood, Errors) {
  const auto trie = CountTrie::build(kAlternating, 2, 2);
  EXPECT_THROW(log_likelihood(tree({"00", "10", "1"}, binary()), trie), DomainError);
  EXPECT_THROW(log_likelihood(tree({"000", "100", "10", "1"}, binary()), trie), DomainError);
  try {
    log_likelihood(tree({"00", "10", "1"}, binary()), trie);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("unobserved"), std::string::npos);
  }
}

TEST(LogLikelihood, DirectSummationOnSimulatedSample) {
  const auto x = simulate(make_paper_model(), 20000, 4);
  const auto trie = CountTrie::build(x, 5, 7);
  const auto model = make_paper_model();
  const auto& truth = model.tree();
  double direct = 0.0;
  const auto fitted = fit_pct(truth, trie, five());
  for (std::size_t t = 7; t < x.size(); ++t) {
    const auto ctx = context_of(truth, std::span<const Symbol>(x.data() + t - 7, 7));
    ASSERT_TRUE(ctx);
    direct += std::log(fitted.probs_of(*ctx)[x[t]]);
  }
  EXPECT_NEAR(log_likelihood(truth, trie), direct, 1e-9 * std::abs(direct));
}

TEST(FitPct, Examples) {
  const auto trie = CountTrie::build(kAlternating, 2, 2);
  const auto pct = fit_pct(tree({"0", "1"}, binary()), trie, binary());
  EXPECT_EQ(pct.probs_of(w("0", binary())), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(pct.probs_of(w("1", binary())), (std::vector<double>{1.0, 0.0}));

  const auto x = random_sequence(400, 3, 2);
  const auto t3 = CountTrie::build(x, 3, 2);
  const auto root = fit_pct(ContextTree::root(), t3, Alphabet::digits(3));
  std::vector<double> freq(3, 0.0);
  for (std::size_t t = 2; t < x.size(); ++t) freq[x[t]] += 1.0 / static_cast<double>(x.size() - 2);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(root.probs_of(Word{})[a], freq[a], 1e-12);
  EXPECT_THROW(fit_pct(tree({"00", "10", "1"}, binary()), trie, binary()), DomainError);
}

TEST(BicEstimate, Extremes) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = random_sequence(300, 3, seed);
    const auto trie = CountTrie::build(x, 3, 3);
    const auto full = IncidenceRule::full();
    const auto top = bic_estimate(trie, 1e-12, full, DofMode::PaperSum);
    const double ltop = log_likelihood(top, trie);
    const double lroot = log_likelihood(ContextTree::root(), trie);
    const double big = (ltop - lroot) / std::log(300.0) + 1.0;
    EXPECT_TRUE(bic_estimate(trie, big, full, DofMode::PaperSum).is_root());
    // The smallest constant gives the largest tree on the oracle's list.
    const auto brute = brute_force_search(x, 3, 3, full, DofMode::PaperSum);
    EXPECT_EQ(top, brute.per_df.back().tree);
  }
  const auto trie = CountTrie::build(kAlternating, 2, 2);
  EXPECT_THROW(bic_estimate(trie, 0.0, IncidenceRule::full(), DofMode::PaperSum), DomainError);
}

TEST(ChampionSet, AlternatingSample) {
  const auto trie = CountTrie::build(kAlternating, 2, 2);
  const auto set = champion_set(trie, IncidenceRule::full(), DofMode::MinusOne);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.entries[0].tree, tree({"0", "1"}, binary()));
  EXPECT_TRUE(set.entries[1].tree.is_root());
  const double c_star = -8 * std::log(0.5) / std::log(10.0);
  EXPECT_NEAR(c_star, 2.408, 1e-3);
  EXPECT_EQ(set.entries[0].c_lo, 0.0);
  EXPECT_NEAR(set.entries[0].c_hi, c_star, 1e-12);
  EXPECT_NEAR(set.entries[1].c_lo, c_star, 1e-12);
  EXPECT_TRUE(std::isinf(set.entries[1].c_hi));
  // At the boundary the smaller tree wins.
  EXPECT_TRUE(bic_estimate(trie, set.entries[1].c_lo, IncidenceRule::full(), DofMode::MinusOne).is_root());

  const auto brute = brute_force_champions(kAlternating, 2, 2, IncidenceRule::full(), DofMode::MinusOne);
  std::string why;
  EXPECT_TRUE(same_champions(set, brute, 1e-9, &why)) << why;
}

TEST(ChampionSet, ConstantSampleIsRootOnly) {
  const auto x = seq("4444444444");
  const auto trie = CountTrie::build(x, 5, 3);
  const auto set = champion_set(trie, IncidenceRule::full(), DofMode::PaperSum);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_TRUE(set.entries[0].tree.is_root());
  const auto brute = brute_force_champions(x, 5, 3, IncidenceRule::full(), DofMode::PaperSum);
  std::string why;
  EXPECT_TRUE(same_champions(set, brute, 1e-9, &why)) << why;
}

TEST(ChampionSet, MatchesOracleOnRandomBinarySamples) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = random_sequence(200, 2, seed);
    for (auto mode : {DofMode::PaperSum, DofMode::MinusOne}) {
      const auto trie = CountTrie::build(x, 2, 3);
      const auto set = champion_set(trie, IncidenceRule::full(), mode);
      expect_set_invariants(set);
      std::string why;
      EXPECT_TRUE(same_champions(set, brute_force_champions(x, 2, 3, IncidenceRule::full(), mode), 1e-9, &why))
          << "seed " << seed << ": " << why;
    }
  }
}

TEST(ChampionSet, MatchesOracleOnSharedInstances) {
  for (const auto& c : oracle_cases(50)) {
    const auto trie = CountTrie::build(c.x, c.alphabet_size, c.depth);
    const auto set = champion_set(trie, c.rule(), c.mode);
    expect_set_invariants(set, df_tree(ContextTree::root(), c.rule(), c.mode, c.alphabet_size));
    std::string why;
    EXPECT_TRUE(
        same_champions(set, brute_force_champions(c.x, c.alphabet_size, c.depth, c.rule(), c.mode), 1e-9, &why))
        << c.describe() << ": " << why;
  }
}

TEST(BicEstimate, EqualsOracleArgmaxInsideAndOnBoundaries) {
  for (const auto& c : oracle_cases(20)) {
    const auto trie = CountTrie::build(c.x, c.alphabet_size, c.depth);
    const auto brute = brute_force_search(c.x, c.alphabet_size, c.depth, c.rule(), c.mode);
    const PenalizedTrie pt(trie, c.rule(), c.mode);
    std::vector<double> constants;
    for (const auto& e : brute.champions.entries) {
      if (e.c_lo > 0) constants.push_back(e.c_lo);
      constants.push_back(std::isinf(e.c_hi) ? e.c_lo * 2 + 1 : (e.c_lo + e.c_hi) / 2);
    }
    for (double cst : constants) {
      // Oracle argmax over the per-df maximizers; ties go to smaller df.
      const Champion* best = nullptr;
      for (const auto& e : brute.per_df) {
        if (!best || penalized(e, cst, c.n) > penalized(*best, cst, c.n) + 1e-9) best = &e;
      }
      const auto fit = pt.fit(cst);
      EXPECT_EQ(fit.tree, best->tree) << c.describe() << " c=" << cst;
      EXPECT_NEAR(fit.log_likelihood, log_likelihood(fit.tree, trie), 1e-9);
      EXPECT_EQ(fit.df, df_tree(fit.tree, c.rule(), c.mode, c.alphabet_size));
    }
  }
}

TEST(BicEstimate, MonotoneInPenalty) {
  for (const auto& c : oracle_cases(50)) {
    const auto trie = CountTrie::build(c.x, c.alphabet_size, c.depth);
    const PenalizedTrie pt(trie, c.rule(), c.mode);
    ContextTree prev = pt.fit(1e-3).tree;
    for (int i = 1; i < 20; ++i) {
      const double cst = 1e-3 * std::pow(1e4, i / 19.0);
      const auto next = pt.fit(cst).tree;
      const auto order = compare_trees(prev, next);
      EXPECT_TRUE(order == TreeOrder::Greater || order == TreeOrder::Equal) << c.describe() << " c=" << cst;
      prev = next;
    }
  }
}

TEST(Oracle, PerDfMaximality) {
  for (const auto& c : oracle_cases(10)) {
    const auto brute = brute_force_search(c.x, c.alphabet_size, c.depth, c.rule(), c.mode);
    EXPECT_GT(brute.trees_enumerated, 0u);
    for (const auto& e : brute.champions.entries) {
      bool listed = false;
      for (const auto& p : brute.per_df) listed = listed || (p.tree == e.tree);
      EXPECT_TRUE(listed);
    }
    for (std::size_t i = 1; i < brute.per_df.size(); ++i) {
      EXPECT_GT(brute.per_df[i].df, brute.per_df[i - 1].df);
      EXPECT_GT(brute.per_df[i].log_likelihood, brute.per_df[i - 1].log_likelihood);
    }
  }
}

TEST(Oracle, RefusesLargeInstances) {
  const auto x = random_sequence(5000, 4, 1);
  BruteForceOptions opts;
  opts.max_trees = 1000;
  EXPECT_THROW(brute_force_champions(x, 4, 3, IncidenceRule::full(), DofMode::PaperSum, opts), DomainError);
}

TEST(ChampionSet, RhythmRuleKeepsInvariants) {
  const auto x = simulate(make_paper_model(), 20000, 8);
  const auto trie = CountTrie::build(x, 5, 5);
  for (auto mode : {DofMode::PaperSum, DofMode::MinusOne}) {
    const auto set = champion_set(trie, IncidenceRule::rhythm(five()), mode);
    expect_set_invariants(set);
  }
}

TEST(ChampionSet, SimulatedSampleContainsGeneratingTree) {
  const auto model = make_paper_model();
  const auto x = simulate(model, 100000, 1);
  const auto trie = CountTrie::build(x, 5, 7);
  const auto set = champion_set(trie, IncidenceRule::full(), DofMode::PaperSum);
  expect_set_invariants(set);
  const auto pos = set.find(model.tree());
  ASSERT_TRUE(pos) << "generating tree missing";
  const auto& e = set.entries[*pos];
  const double inside = std::isinf(e.c_hi) ? e.c_lo * 2 : (e.c_lo + e.c_hi) / 2;
  EXPECT_EQ(bic_estimate(trie, inside, IncidenceRule::full(), DofMode::PaperSum), model.tree());
}

TEST(Serialization, ChampionsJsonAndCsv) {
  const auto trie = CountTrie::build(kAlternating, 2, 2);
  const auto set = champion_set(trie, IncidenceRule::full(), DofMode::MinusOne, "full");
  const auto csv = champions_csv(set);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "leaves,df,loglik,c_lo,c_hi");
  EXPECT_NE(csv.find("\n2,2,0,0,"), std::string::npos);
  EXPECT_NE(csv.find(",inf\n"), std::string::npos);
  const auto doc = nlohmann::json::parse(serialize_champions(set, binary()));
  EXPECT_EQ(doc["champions"].size(), 2u);
  EXPECT_EQ(doc["dof_mode"], "minus-one");
  EXPECT_TRUE(doc["champions"][1]["c_hi"].is_null());
  EXPECT_EQ(doc["champions"][0]["contexts"][0], nlohmann::json::array({"0"}));
}
