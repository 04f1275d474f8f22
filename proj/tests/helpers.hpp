#pragma once

#include <string>
#include <vector>

#include "smc/smc.hpp"

namespace smc::testing {

inline const Alphabet& binary() {
  static const Alphabet a = Alphabet::digits(2);
  return a;
}

inline const Alphabet& five() {
  static const Alphabet a = Alphabet::digits(5);
  return a;
}

/// Word from a compact digit string such as "201".
inline Word w(const std::string& s, const Alphabet& a = five()) { return s.empty() ? Word{} : a.parse_word(s); }

inline ContextTree tree(std::initializer_list<const char*> contexts, const Alphabet& a = five()) {
  std::vector<Word> words;
  for (const char* c : contexts) words.push_back(w(c, a));
  return ContextTree(std::move(words));
}

inline SymbolSequence seq(const std::string& digits) {
  SymbolSequence x;
  for (char c : digits) x.push_back(static_cast<Symbol>(c - '0'));
  return x;
}

inline SymbolSequence random_sequence(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  SymbolSequence x(n);
  for (auto& s : x) s = static_cast<Symbol>(rng.below(k));
  return x;
}

}  // namespace smc::testing

namespace smc::testing {

/// Tree-for-tree comparison of two champion sets with interval boundaries
/// compared to an absolute tolerance. On mismatch `why` says where.
inline bool same_champions(const ChampionSet& a, const ChampionSet& b, double tol, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.size() != b.size())
    return fail("sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    const auto at = " at entry " + std::to_string(i);
    if (!(x.tree == y.tree)) return fail("trees differ" + at);
    if (x.df != y.df) return fail("df differs" + at);
    if (std::abs(x.log_likelihood - y.log_likelihood) > tol * std::max(1.0, std::abs(x.log_likelihood)))
      return fail("log-likelihood differs" + at);
    auto close = [&](double u, double v) { return (std::isinf(u) && std::isinf(v)) || std::abs(u - v) <= tol; };
    if (!close(x.c_lo, y.c_lo)) return fail("c_lo differs" + at + ": " + format_number(x.c_lo) + " vs " + format_number(y.c_lo));
    if (!close(x.c_hi, y.c_hi)) return fail("c_hi differs" + at + ": " + format_number(x.c_hi) + " vs " + format_number(y.c_hi));
  }
  return true;
}

/// The randomized instance family shared by the oracle and monotonicity
/// checks: |A| in {2,3}, n in [100,400], d in {2,3}, full or custom rule,
/// both df modes.
struct OracleCase {
  std::uint64_t seed;
  std::size_t alphabet_size;
  std::size_t n;
  std::size_t depth;
  bool custom;
  DofMode mode;
  SymbolSequence x;

  IncidenceRule rule() const {
    if (!custom) return IncidenceRule::full();
    // After a 0 the next symbol cannot be the top symbol, and after "10" it
    // cannot be 0.
    const auto top = static_cast<Symbol>(alphabet_size - 1);
    return IncidenceRule::custom({{Word{0}, top}, {Word{1, 0}, 0}});
  }

  std::string describe() const {
    return "seed=" + std::to_string(seed) + " |A|=" + std::to_string(alphabet_size) + " n=" + std::to_string(n) +
           " d=" + std::to_string(depth) + (custom ? " custom" : " full") + " " + to_string(mode);
  }
};

inline std::vector<OracleCase> oracle_cases(std::size_t count = 50) {
  std::vector<OracleCase> out;
  for (std::size_t i = 0; i < count; ++i) {
    OracleCase c;
    c.seed = 1000 + i;
    Rng rng(c.seed);
    c.alphabet_size = 2 + i % 2;
    c.n = 100 + rng.below(301);
    c.depth = 2 + (i / 2) % 2;
    c.custom = (i / 4) % 2 == 1;
    c.mode = (i / 8) % 2 == 0 ? DofMode::PaperSum : DofMode::MinusOne;
    // A skewed low-order chain so that champion sets have several members.
    c.x.resize(c.n);
    Symbol prev = 0;
    for (auto& s : c.x) {
      const double u = rng.uniform();
      s = u < 0.55 ? static_cast<Symbol>((prev + 1) % c.alphabet_size)
                   : static_cast<Symbol>(rng.below(c.alphabet_size));
      prev = s;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace smc::testing
