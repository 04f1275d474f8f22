#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/error.hpp"

namespace smc {

/// Contents of a tree file: an alphabet, a context set and, optionally, one
/// probability vector per context.
///
///   {"alphabet": ["0", "1"],
///    "contexts": [{"context": ["0"], "probs": [0.2, 0.8]},
///                 {"context": ["1"], "probs": [0.5, 0.5]}]}
///
/// Each context lists its tokens oldest first. The root-only tree has a
/// single record with an empty context list.
struct TreeFile {
  Alphabet alphabet;
  ContextTree tree;
  std::optional<std::vector<std::vector<double>>> probs;

  ProbabilisticContextTree to_pct() const {
    if (!probs) throw DomainError("tree file has no transition probabilities");
    return ProbabilisticContextTree(alphabet, tree, *probs);
  }
};

namespace detail {

inline nlohmann::json tree_json(const Alphabet& alphabet, const ContextTree& tree,
                                const std::vector<std::vector<double>>* probs) {
  nlohmann::json doc;
  doc["alphabet"] = alphabet.tokens();
  auto contexts = nlohmann::json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    nlohmann::json rec;
    auto tokens = nlohmann::json::array();
    for (Symbol s : tree.contexts()[i]) tokens.push_back(alphabet.token(s));
    rec["context"] = std::move(tokens);
    if (probs) rec["probs"] = (*probs)[i];
    contexts.push_back(std::move(rec));
  }
  doc["contexts"] = std::move(contexts);
  return doc;
}

}  // namespace detail

inline std::string serialize_tree(const Alphabet& alphabet, const ContextTree& tree) {
  return detail::tree_json(alphabet, tree, nullptr).dump(2) + "\n";
}

inline std::string serialize_tree(const ProbabilisticContextTree& pct) {
  return detail::tree_json(pct.alphabet(), pct.tree(), &pct.probs()).dump(2) + "\n";
}

inline std::string serialize_tree(const TreeFile& file) {
  return detail::tree_json(file.alphabet, file.tree, file.probs ? &*file.probs : nullptr).dump(2) +
         "\n";
}

/// Parses a tree file. The tree itself is validated; records may come in any
/// order and are returned sorted.
inline TreeFile parse_tree_file(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("tree file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("alphabet") || !doc.contains("contexts"))
    throw DomainError("tree file needs 'alphabet' and 'contexts' fields");

  TreeFile out;
  try {
    out.alphabet = Alphabet(doc.at("alphabet").get<std::vector<std::string>>());
    std::vector<std::pair<Word, std::optional<std::vector<double>>>> records;
    std::size_t with_probs = 0;
    for (const auto& rec : doc.at("contexts")) {
      Word w;
      for (const auto& tok : rec.at("context")) w.push_back(out.alphabet.index(tok.get<std::string>()));
      std::optional<std::vector<double>> p;
      if (rec.contains("probs") && !rec.at("probs").is_null()) {
        p = rec.at("probs").get<std::vector<double>>();
        ++with_probs;
      }
      records.emplace_back(std::move(w), std::move(p));
    }
    if (with_probs != 0 && with_probs != records.size())
      throw DomainError("either every context or none must carry probs");
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Word> words;
    for (const auto& r : records) words.push_back(r.first);
    out.tree = ContextTree(words);
    if (out.tree.size() != records.size()) throw DomainError("duplicate context in tree file");
    if (with_probs) {
      std::vector<std::vector<double>> probs;
      for (auto& r : records) probs.push_back(std::move(*r.second));
      out.probs = std::move(probs);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed tree file: ") + e.what());
  }
  if (auto v = validate_tree(out.tree)) throw DomainError(v->message(out.alphabet));
  if (out.probs) (void)out.to_pct();  // checks lengths and normalization
  return out;
}

}  // namespace smc
