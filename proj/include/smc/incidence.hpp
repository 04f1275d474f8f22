#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/error.hpp"

namespace smc {

/// How the allowed transitions of a context turn into degrees of freedom.
///   PaperSum: sum_a chi(wa)
///   MinusOne: max(sum_a chi(wa) - 1, 0), the free parameters of the context
enum class DofMode { PaperSum, MinusOne };

inline const char* to_string(DofMode m) {
  return m == DofMode::PaperSum ? "paper-sum" : "minus-one";
}

/// Forbids `next` after any past ending with `pattern`.
struct ForbiddenTransition {
  Word pattern;
  Symbol next;
  friend bool operator==(const ForbiddenTransition&, const ForbiddenTransition&) = default;
};

/// The incidence function chi(w, a): 1 when the transition from past w to
/// symbol a is allowed.
///
/// Rhythm encodes the prosodic constraints of the 5-symbol syllable code
/// (0 = unstressed, 1 = stressed, 2 = unstressed word-initial, 3 = stressed
/// word-initial, 4 = sentence end):
///   R1  no 0 after 1000 or 3000 (at most three unstressed after a stress);
///   R2  no 1 while the most recent non-0 symbol is 3;
///   R3  no 2 or 3 while the most recent non-0 symbol is 2;
///   R4  only 2 or 3 after 4.
/// A 4 ends the scan for R2/R3, and pasts made only of 0s leave them inactive.
class IncidenceRule {
 public:
  enum class Kind { Full, Rhythm, Custom };

  static IncidenceRule full() { return IncidenceRule(Kind::Full); }

  static IncidenceRule rhythm(const Alphabet& alphabet) {
    IncidenceRule r(Kind::Rhythm);
    for (int i = 0; i < 5; ++i) {
      auto s = alphabet.find(std::to_string(i));
      if (!s)
        throw DomainError("the rhythm rule needs tokens 0..4 in the alphabet (missing '" +
                          std::to_string(i) + "')");
      r.code_[static_cast<std::size_t>(i)] = *s;
    }
    return r;
  }

  static IncidenceRule custom(std::vector<ForbiddenTransition> forbidden) {
    IncidenceRule r(Kind::Custom);
    r.forbidden_ = std::move(forbidden);
    return r;
  }

  Kind kind() const { return kind_; }
  const std::vector<ForbiddenTransition>& forbidden() const { return forbidden_; }

  bool allows(std::span<const Symbol> w, Symbol a) const {
    switch (kind_) {
      case Kind::Full: return true;
      case Kind::Rhythm: return rhythm_allows(w, a);
      case Kind::Custom:
        for (const auto& f : forbidden_)
          if (f.next == a && is_suffix(f.pattern, w)) return false;
        return true;
    }
    return true;
  }

  /// Number of allowed next symbols after `w`.
  std::size_t allowed_count(std::span<const Symbol> w, std::size_t alphabet_size) const {
    std::size_t n = 0;
    for (std::size_t a = 0; a < alphabet_size; ++a) n += allows(w, static_cast<Symbol>(a)) ? 1 : 0;
    return n;
  }

  std::string describe(const Alphabet& alphabet) const {
    switch (kind_) {
      case Kind::Full: return "full";
      case Kind::Rhythm: return "rhythm";
      case Kind::Custom: {
        std::string out = "custom[";
        for (std::size_t i = 0; i < forbidden_.size(); ++i) {
          if (i) out += "; ";
          out += (forbidden_[i].pattern.empty() ? std::string() : alphabet.format(forbidden_[i].pattern)) +
                 " -> " + alphabet.token(forbidden_[i].next);
        }
        return out + "]";
      }
    }
    return "?";
  }

 private:
  explicit IncidenceRule(Kind k) : kind_(k) {}

  bool rhythm_allows(std::span<const Symbol> w, Symbol a) const {
    const Symbol s0 = code_[0], s1 = code_[1], s2 = code_[2], s3 = code_[3], s4 = code_[4];
    if (!w.empty() && w.back() == s4) return a == s2 || a == s3;  // R4
    if (a == s0 && w.size() >= 4) {                                // R1
      const auto n = w.size();
      if (w[n - 1] == s0 && w[n - 2] == s0 && w[n - 3] == s0 && (w[n - 4] == s1 || w[n - 4] == s3))
        return false;
    }
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      if (*it == s0) continue;
      if (*it == s3 && a == s1) return false;                    // R2
      if (*it == s2 && (a == s2 || a == s3)) return false;       // R3
      break;
    }
    return true;
  }

  Kind kind_;
  std::array<Symbol, 5> code_{};
  std::vector<ForbiddenTransition> forbidden_;
};

/// Degrees of freedom contributed by a single context.
inline long node_dof(const IncidenceRule& rule, DofMode mode, std::span<const Symbol> w,
                     std::size_t alphabet_size) {
  const auto allowed = static_cast<long>(rule.allowed_count(w, alphabet_size));
  return mode == DofMode::PaperSum ? allowed : std::max(allowed - 1, 0L);
}

/// df(tree; chi) summed over the contexts of `tree`.
inline long df_tree(const ContextTree& tree, const IncidenceRule& rule, DofMode mode,
                    std::size_t alphabet_size) {
  long df = 0;
  for (const auto& w : tree.contexts()) df += node_dof(rule, mode, w, alphabet_size);
  return df;
}

/// A witness that chi is not suffix-consistent: chi(w a) = 0 but chi(u a) = 1
/// for the longer past u that ends with w.
struct ConsistencyViolation {
  Word shorter;
  Word longer;
  Symbol next;
};

/// Checks, for every past of length < probe_depth and every one-symbol
/// extension, that a forbidden transition stays forbidden. One-symbol steps
/// chain, so this covers all extensions up to probe_depth.
inline std::optional<ConsistencyViolation> validate_consistency(const IncidenceRule& rule,
                                                                const Alphabet& alphabet,
                                                                std::size_t probe_depth = 8) {
  const std::size_t k = alphabet.size();
  Word w;
  std::optional<ConsistencyViolation> found;
  // Iterative enumeration of all words of each length, odometer style.
  for (std::size_t len = 0; len < probe_depth && !found; ++len) {
    w.assign(len, 0);
    while (true) {
      for (std::size_t a = 0; a < k && !found; ++a) {
        if (rule.allows(w, static_cast<Symbol>(a))) continue;
        Word longer(len + 1);
        std::copy(w.begin(), w.end(), longer.begin() + 1);
        for (std::size_t b = 0; b < k; ++b) {
          longer[0] = static_cast<Symbol>(b);
          if (rule.allows(longer, static_cast<Symbol>(a))) {
            found = ConsistencyViolation{w, longer, static_cast<Symbol>(a)};
            break;
          }
        }
      }
      if (found) break;
      std::size_t pos = 0;
      while (pos < len && ++w[pos] == k) w[pos++] = 0;
      if (pos == len) break;
    }
  }
  return found;
}

/// Parses a custom rules file. Each non-empty line that is not a comment
/// reads `forbid <pattern> -> <symbol>`; the pattern is matched as a suffix
/// of the past and may be empty.
inline IncidenceRule parse_custom_rules(std::string_view text, const Alphabet& alphabet) {
  std::vector<ForbiddenTransition> forbidden;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto where = " (line " + std::to_string(lineno) + ")";
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword != "forbid") throw DomainError("expected 'forbid'" + where);
    std::string rest;
    std::getline(ls, rest);
    const auto arrow = rest.find("->");
    if (arrow == std::string::npos) throw DomainError("expected '->'" + where);
    std::istringstream target(rest.substr(arrow + 2));
    std::string symbol, extra;
    target >> symbol;
    if (symbol.empty() || (target >> extra)) throw DomainError("expected one target symbol" + where);
    try {
      forbidden.push_back({alphabet.parse_word(rest.substr(0, arrow)), alphabet.index(symbol)});
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + where);
    }
  }
  return IncidenceRule::custom(std::move(forbidden));
}

}  // namespace smc
