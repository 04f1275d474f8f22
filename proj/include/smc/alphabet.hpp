#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smc/error.hpp"

namespace smc {

/// Index of a token in an Alphabet.
using Symbol = std::uint16_t;

/// A finite string over an alphabet, stored oldest symbol first and most
/// recent symbol last. The empty word is the root context.
using Word = std::vector<Symbol>;

/// A sample X_1..X_n of alphabet indices.
using SymbolSequence = std::vector<Symbol>;

/// Ordered list of distinct, non-empty tokens.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty()) throw DomainError("alphabet must contain at least one token");
    if (tokens_.size() > 0xFFFF) throw DomainError("alphabet too large");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].empty()) throw DomainError("alphabet tokens must be non-empty");
      if (!index_.emplace(tokens_[i], static_cast<Symbol>(i)).second)
        throw DomainError("duplicate alphabet token '" + tokens_[i] + "'");
    }
  }

  /// Tokens "0", "1", ..., "k-1".
  static Alphabet digits(std::size_t k) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < k; ++i) tokens.push_back(std::to_string(i));
    return Alphabet(std::move(tokens));
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(Symbol s) const { return tokens_.at(s); }

  std::optional<Symbol> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Symbol index(std::string_view token) const {
    if (auto s = find(token)) return *s;
    throw DomainError("token '" + std::string(token) + "' is not in the alphabet");
  }

  /// True when every token is a single character, so words can be printed
  /// without separators.
  bool single_char() const {
    return std::all_of(tokens_.begin(), tokens_.end(),
                       [](const std::string& t) { return t.size() == 1; });
  }

  /// Renders a word; single-character alphabets are concatenated, others are
  /// joined with spaces. The empty word renders as "ε".
  std::string format(std::span<const Symbol> w) const {
    if (w.empty()) return "ε";
    std::string out;
    const bool compact = single_char();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!compact && i > 0) out += ' ';
      out += token(w[i]);
    }
    return out;
  }

  /// Parses a word written either charwise ("201") or as whitespace-separated
  /// tokens ("2 0 1").
  Word parse_word(std::string_view text) const {
    Word w;
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    if (words.size() == 1 && !find(words[0]) && single_char()) {
      for (char ch : words[0]) w.push_back(index(std::string_view(&ch, 1)));
      return w;
    }
    for (const auto& t : words) w.push_back(index(t));
    return w;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Symbol> index_;
};

enum class ParseMode { Charwise, Token };

/// A sequence together with the alphabet its indices refer to.
struct Sample {
  Alphabet alphabet;
  SymbolSequence symbols;
};

namespace detail {

// Length in bytes of the UTF-8 code point starting with `lead`.
inline std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

inline std::vector<std::string> split_tokens(std::string_view text, ParseMode mode) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto ch = static_cast<unsigned char>(text[i]);
    if (std::isspace(ch)) {
      ++i;
      continue;
    }
    if (mode == ParseMode::Charwise) {
      const std::size_t len = std::min(utf8_length(ch), text.size() - i);
      out.emplace_back(text.substr(i, len));
      i += len;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

}  // namespace detail

/// Parses sequence text. With no alphabet given, the alphabet is the sorted
/// set of distinct tokens found in the text.
inline Sample parse_sample(std::string_view text, ParseMode mode,
                           const std::optional<Alphabet>& alphabet = std::nullopt) {
  auto tokens = detail::split_tokens(text, mode);
  Sample sample;
  if (alphabet) {
    sample.alphabet = *alphabet;
  } else {
    std::set<std::string> distinct(tokens.begin(), tokens.end());
    if (distinct.empty()) throw DomainError("cannot infer an alphabet from an empty sequence");
    sample.alphabet = Alphabet(std::vector<std::string>(distinct.begin(), distinct.end()));
  }
  sample.symbols.reserve(tokens.size());
  for (const auto& t : tokens) sample.symbols.push_back(sample.alphabet.index(t));
  return sample;
}

/// Inverse of parse_sample: charwise output has no separators, token output
/// is space separated. Ends with a newline unless the sequence is empty.
inline std::string format_sample(std::span<const Symbol> x, const Alphabet& alphabet,
                                 ParseMode mode) {
  if (mode == ParseMode::Charwise && !alphabet.single_char())
    throw DomainError("charwise output needs single-character tokens");
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mode == ParseMode::Token && i > 0) out += ' ';
    out += alphabet.token(x[i]);
  }
  if (!x.empty()) out += '\n';
  return out;
}

}  // namespace smc
