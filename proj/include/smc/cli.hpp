#pragma once

// Command-line front end. Needs CLI11 and OpenSSL (libcrypto) in addition to
// the core headers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "smc/alphabet.hpp"
#include "smc/context_tree.hpp"
#include "smc/count_trie.hpp"
#include "smc/error.hpp"
#include "smc/estimation.hpp"
#include "smc/format.hpp"
#include "smc/incidence.hpp"
#include "smc/report.hpp"
#include "smc/resampling.hpp"
#include "smc/simulation.hpp"
#include "smc/tree_io.hpp"

namespace smc::cli {

inline constexpr const char* kVersion = "0.1.0";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return text;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

/// Options shared by the commands that read a sequence.
struct SequenceOptions {
  std::string input;
  std::string alphabet;  ///< comma-separated tokens; empty = infer
  std::string parse = "charwise";
  std::optional<std::size_t> depth;
  std::string rule = "full";
  std::string rules_file;
  std::string dof = "paper-sum";
};

struct LoadedSample {
  Sample sample;
  std::string digest;
  std::size_t depth = 0;
  IncidenceRule rule = IncidenceRule::full();
  std::string rule_name;
  DofMode mode = DofMode::PaperSum;
};

inline ParseMode parse_mode_of(const std::string& s) {
  if (s == "charwise") return ParseMode::Charwise;
  if (s == "token") return ParseMode::Token;
  throw DomainError("unknown parse mode '" + s + "'");
}

inline std::optional<Alphabet> alphabet_of(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::vector<std::string> tokens;
  std::stringstream ss(spec);
  std::string t;
  while (std::getline(ss, t, ',')) {
    if (t.empty()) throw DomainError("empty token in --alphabet");
    tokens.push_back(t);
  }
  return Alphabet(std::move(tokens));
}

/// min(floor(log n / log |A|), 12), kept within [1, n - 1].
inline std::size_t default_depth(std::size_t n, std::size_t alphabet_size) {
  std::size_t d = 12;
  if (alphabet_size > 1 && n > 1) {
    const double ratio = std::log(static_cast<double>(n)) / std::log(static_cast<double>(alphabet_size));
    d = std::min<std::size_t>(12, static_cast<std::size_t>(std::floor(ratio + 1e-9)));
  }
  if (n >= 2) d = std::min(d, n - 1);
  return std::max<std::size_t>(d, 1);
}

inline DofMode dof_mode_of(const std::string& s) {
  if (s == "paper-sum") return DofMode::PaperSum;
  if (s == "minus-one") return DofMode::MinusOne;
  throw DomainError("unknown dof mode '" + s + "'");
}

inline IncidenceRule rule_of(const SequenceOptions& o, const Alphabet& alphabet, std::string& name) {
  if (!o.rules_file.empty() && o.rule != "custom") throw DomainError("--rules-file needs --rule custom");
  if (o.rule == "full") {
    name = "full";
    return IncidenceRule::full();
  }
  if (o.rule == "rhythm") {
    name = "rhythm";
    return IncidenceRule::rhythm(alphabet);
  }
  if (o.rule == "custom") {
    if (o.rules_file.empty()) throw DomainError("--rule custom needs --rules-file");
    auto rule = parse_custom_rules(read_file(o.rules_file), alphabet);
    name = rule.describe(alphabet);
    return rule;
  }
  throw DomainError("unknown rule '" + o.rule + "'");
}

inline LoadedSample load_sample(const SequenceOptions& o) {
  LoadedSample ls;
  const std::string text = read_file(o.input);
  ls.digest = sha256_hex(text);
  ls.sample = parse_sample(text, parse_mode_of(o.parse), alphabet_of(o.alphabet));
  ls.depth = o.depth ? *o.depth : default_depth(ls.sample.symbols.size(), ls.sample.alphabet.size());
  if (ls.depth < 1) throw DomainError("depth must be at least 1");
  ls.rule = rule_of(o, ls.sample.alphabet, ls.rule_name);
  ls.mode = dof_mode_of(o.dof);
  return ls;
}

inline nlohmann::json sequence_flags(const SequenceOptions& o, const LoadedSample& ls) {
  nlohmann::json f;
  f["input"] = o.input;
  f["alphabet"] = ls.sample.alphabet.tokens();
  f["alphabet_inferred"] = o.alphabet.empty();
  f["parse"] = o.parse;
  f["depth"] = ls.depth;
  f["depth_defaulted"] = !o.depth.has_value();
  f["rule"] = ls.rule_name;
  f["rules_file"] = o.rules_file;
  f["dof"] = to_string(ls.mode);
  return f;
}

/// Everything needed to rerun a command bit-exactly. The output directory is
/// left out so that runs into different directories compare equal.
inline std::string manifest(const std::string& command, nlohmann::json flags, const std::string& digest,
                            nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json m;
  m["command"] = command;
  m["flags"] = std::move(flags);
  m["input_sha256"] = digest;
  m["versions"] = {{"smc", kVersion},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"cli11", CLI11_VERSION}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  return m.dump(2) + "\n";
}

inline int cmd_champions(const SequenceOptions& o, const std::string& out_dir, std::ostream& out) {
  const auto ls = load_sample(o);
  const auto trie = CountTrie::build(ls.sample.symbols, ls.sample.alphabet.size(), ls.depth);
  const auto set = champion_set(trie, ls.rule, ls.mode, ls.rule_name);
  const std::filesystem::path dir(out_dir);
  write_file(dir / "champions.json", serialize_champions(set, ls.sample.alphabet));
  write_file(dir / "champions.csv", champions_csv(set));
  write_file(dir / "champions.manifest.json",
             manifest("champions", sequence_flags(o, ls), ls.digest,
                      {{"sample_size", ls.sample.symbols.size()}, {"champions", set.size()}}));
  out << set.size() << " champion trees, leaves:";
  for (const auto& e : set.entries) out << ' ' << e.leaves();
  out << '\n';
  return 0;
}

struct SmcOptions {
  std::vector<std::size_t> sizes;
  std::size_t resamples = 250;
  std::uint64_t seed = 1;
  std::string renewal;
  bool strict = false;
  std::string shrink = "residual";
  double epsilon = 1e-3;
};

inline int cmd_smc(const SequenceOptions& o, const SmcOptions& s, const std::string& out_dir,
                   std::ostream& out) {
  const auto ls = load_sample(o);
  const auto& alphabet = ls.sample.alphabet;
  std::string renewal_token = s.renewal.empty() ? "4" : s.renewal;
  const auto renewal = alphabet.find(renewal_token);
  if (!renewal)
    throw DomainError("renewal symbol '" + renewal_token + "' is not in the alphabet; pass --renewal");

  BootstrapConfig cfg;
  cfg.sizes = s.sizes;
  if (cfg.sizes.empty())
    for (std::size_t j = 1; j <= 8; ++j) cfg.sizes.push_back(j * 10000);
  cfg.resamples = s.resamples;
  cfg.seed = s.seed;
  cfg.validate(ls.depth);

  SelectionParams params;
  params.strict = s.strict;
  params.epsilon = s.epsilon;
  if (s.shrink == "residual") params.rule = ShrinkRule::Residual;
  else if (s.shrink == "threshold") params.rule = ShrinkRule::Threshold;
  else throw DomainError("unknown shrink rule '" + s.shrink + "'");

  const auto trie = CountTrie::build(ls.sample.symbols, alphabet.size(), ls.depth);
  const auto set = champion_set(trie, ls.rule, ls.mode, ls.rule_name);
  const auto blocks = split_renewal_blocks(ls.sample.symbols, *renewal);
  const auto report = bootstrap_deltas(set, blocks, cfg, ls.depth, alphabet.size());
  const auto sel = smc_select(set, report, params);
  const auto fitted = fit_pct(sel.tree, trie, alphabet);

  const std::filesystem::path dir(out_dir);
  write_file(dir / "champions.json", serialize_champions(set, alphabet));
  write_file(dir / "champions.csv", champions_csv(set));
  write_file(dir / "selected_tree.json", serialize_tree(fitted));
  write_file(dir / "bootstrap.csv", bootstrap_csv(report));

  nlohmann::json diag;
  diag["selected_index"] = sel.index;
  diag["selected_leaves"] = sel.tree.size();
  diag["warning_no_pair_shrinks"] = sel.warning;
  auto pairs = nlohmann::json::array();
  for (std::size_t p = 0; p < sel.pairs.size(); ++p) {
    const auto& d = sel.pairs[p];
    pairs.push_back({{"pair_index", p},
                     {"smaller_leaves", report.pairs[p].smaller_leaves},
                     {"larger_leaves", report.pairs[p].larger_leaves},
                     {"rss_constant", d.rss_constant},
                     {"rss_log_rate", d.rss_log_rate},
                     {"slope", d.slope},
                     {"shrinks", d.shrinks}});
  }
  diag["pairs"] = std::move(pairs);
  write_file(dir / "smc_diagnostics.json", diag.dump(2) + "\n");

  auto flags = sequence_flags(o, ls);
  flags["sizes"] = cfg.sizes;
  flags["resamples"] = cfg.resamples;
  flags["seed"] = cfg.seed;
  flags["renewal"] = renewal_token;
  flags["strict"] = params.strict;
  flags["shrink"] = to_string(params.rule);
  flags["epsilon"] = params.epsilon;
  write_file(dir / "smc.manifest.json",
             manifest("smc", flags, ls.digest,
                      {{"sample_size", ls.sample.symbols.size()},
                       {"renewal_blocks", blocks.blocks.size()},
                       {"discarded_tail", blocks.discarded},
                       {"champions", set.size()},
                       {"selected_leaves", sel.tree.size()},
                       {"warning_no_pair_shrinks", sel.warning},
                       {"quartiles", "linear interpolation (type 7)"},
                       {"rng", "mt19937_64 per (seed, size index, resample index)"}}));

  out << "selected tree with " << sel.tree.size() << " contexts:";
  for (const auto& w : sel.tree.contexts()) out << ' ' << alphabet.format(w);
  out << '\n';
  if (sel.warning) out << "warning: no champion pair shrinks; returned the largest champion\n";
  return 0;
}

struct SimulateOptions {
  std::string model;  ///< tree file with probs; empty = built-in model
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::size_t burn_in = 1000;
  std::string format;  ///< charwise | token; empty = charwise when possible
  std::string output = "sample.txt";
};

inline int cmd_simulate(const SimulateOptions& s, const std::string& out_dir, std::ostream& out) {
  std::string digest;
  std::optional<ProbabilisticContextTree> model;
  if (s.model.empty()) {
    model = make_paper_model();
  } else {
    const auto text = read_file(s.model);
    digest = sha256_hex(text);
    model = parse_tree_file(text).to_pct();
  }
  ParseMode mode = model->alphabet().single_char() ? ParseMode::Charwise : ParseMode::Token;
  if (!s.format.empty()) mode = parse_mode_of(s.format);

  SimulationStart start;
  const auto x = simulate(*model, s.n, s.seed, s.burn_in, &start);
  const std::filesystem::path dir(out_dir);
  write_file(dir / s.output, format_sample(x, model->alphabet(), mode));

  nlohmann::json flags;
  flags["model"] = s.model.empty() ? "builtin" : s.model;
  flags["n"] = s.n;
  flags["seed"] = s.seed;
  flags["burn_in"] = s.burn_in;
  flags["format"] = mode == ParseMode::Charwise ? "charwise" : "token";
  flags["output"] = s.output;
  auto history = nlohmann::json::array();
  for (Symbol sym : start.history) history.push_back(model->alphabet().token(sym));
  write_file(dir / "simulate.manifest.json",
             manifest("simulate", flags, digest,
                      {{"initial_history", history},
                       {"renewal_start", start.renewal_start},
                       {"output_sha256", sha256_hex(format_sample(x, model->alphabet(), mode))}}));
  out << "wrote " << x.size() << " symbols to " << (dir / s.output).string() << '\n';
  return 0;
}

inline int cmd_loglik(const SequenceOptions& o, const std::string& tree_path, const std::string& out_dir,
                      std::ostream& out) {
  const auto tree_text = read_file(tree_path);
  const auto file = parse_tree_file(tree_text);
  SequenceOptions opts = o;
  if (opts.alphabet.empty()) {
    std::string joined;
    for (const auto& t : file.alphabet.tokens()) joined += (joined.empty() ? "" : ",") + t;
    opts.alphabet = joined;
  }
  const auto ls = load_sample(opts);
  if (!(ls.sample.alphabet == file.alphabet))
    throw DomainError("the tree file and the sample use different alphabets");
  const auto trie = CountTrie::build(ls.sample.symbols, ls.sample.alphabet.size(), ls.depth);
  const auto& alphabet = ls.sample.alphabet;
  const double ll = log_likelihood(file.tree, trie);  // validates depth and observation
  const long df = df_tree(file.tree, ls.rule, ls.mode, alphabet.size());

  nlohmann::json rep;
  rep["log_likelihood"] = ll;
  rep["df"] = df;
  auto parts = nlohmann::json::array();
  out << "loglik\t" << format_number(ll) << "\ndf\t" << df << '\n';
  for (const auto& w : file.tree.contexts()) {
    const auto node = trie.find(w);
    const double part = node_log_likelihood(trie.next_counts(node), trie.total(node));
    const long g = node_dof(ls.rule, ls.mode, w, alphabet.size());
    out << alphabet.format(w) << '\t' << format_number(part) << '\t' << g << '\n';
    auto tokens = nlohmann::json::array();
    for (Symbol s : w) tokens.push_back(alphabet.token(s));
    parts.push_back({{"context", tokens}, {"log_likelihood", part}, {"df", g}});
  }
  rep["contexts"] = std::move(parts);
  const std::filesystem::path dir(out_dir);
  write_file(dir / "loglik.json", rep.dump(2) + "\n");
  auto flags = sequence_flags(o, ls);
  flags["tree"] = tree_path;
  write_file(dir / "loglik.manifest.json",
             manifest("loglik", flags, ls.digest, {{"tree_sha256", sha256_hex(tree_text)}}));
  return 0;
}

inline int cmd_plot(const std::string& csv_path, const std::string& out_dir, std::ostream& out) {
  const auto text = read_file(csv_path);
  const auto table = parse_report_csv(text);
  const auto stem = std::filesystem::path(csv_path).stem().string();
  const std::filesystem::path dir(out_dir);
  write_file(dir / (stem + ".svg"), render_svg(table));
  nlohmann::json flags;
  flags["csv"] = csv_path;
  flags["kind"] = table.kind == CsvKind::Champions ? "champions" : "bootstrap";
  write_file(dir / "plot.manifest.json", manifest("plot", flags, sha256_hex(text)));
  out << "wrote " << (dir / (stem + ".svg")).string() << '\n';
  return 0;
}

inline void add_sequence_options(CLI::App* app, SequenceOptions& o) {
  app->add_option("input", o.input, "sequence file")->required();
  app->add_option("--alphabet", o.alphabet, "comma-separated tokens (default: inferred, sorted)");
  app->add_option("--parse", o.parse, "charwise or token")->check(CLI::IsMember({"charwise", "token"}));
  app->add_option("-d,--depth", o.depth, "maximal context length d");
  app->add_option("--rule", o.rule, "incidence rule: full, rhythm or custom")
      ->check(CLI::IsMember({"full", "rhythm", "custom"}));
  app->add_option("--rules-file", o.rules_file, "forbidden transitions for --rule custom");
  app->add_option("--dof", o.dof, "paper-sum or minus-one")->check(CLI::IsMember({"paper-sum", "minus-one"}));
}

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 1 domain error, 2 I/O or usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Context tree estimation with the Smallest Maximizer Criterion"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  SequenceOptions seq;
  SmcOptions smc;
  SimulateOptions sim;
  std::string tree_path, csv_path;

  auto* champions = app.add_subcommand("champions", "enumerate the champion trees");
  add_sequence_options(champions, seq);
  champions->add_option("-o,--out", out_dir, "output directory");

  auto* smc_cmd = app.add_subcommand("smc", "select a tree by renewal-block bootstrap");
  add_sequence_options(smc_cmd, seq);
  smc_cmd->add_option("-o,--out", out_dir, "output directory");
  smc_cmd->add_option("--sizes", smc.sizes, "resample sizes (default 10000..80000 step 10000)")->delimiter(',');
  smc_cmd->add_option("-B,--resamples", smc.resamples, "resamples per size");
  smc_cmd->add_option("--seed", smc.seed, "master seed");
  smc_cmd->add_option("--renewal", smc.renewal, "renewal token (default 4)");
  smc_cmd->add_flag("--strict", smc.strict, "require every larger pair to shrink too");
  smc_cmd->add_option("--shrink", smc.shrink, "residual or threshold")
      ->check(CLI::IsMember({"residual", "threshold"}));
  smc_cmd->add_option("--epsilon", smc.epsilon, "Q3 bound for the threshold rule");

  auto* simulate_cmd = app.add_subcommand("simulate", "sample from a probabilistic context tree");
  simulate_cmd->add_option("--model", sim.model, "tree file with probs (default: built-in 13-context model)");
  simulate_cmd->add_option("-n,--length", sim.n, "number of symbols");
  simulate_cmd->add_option("--seed", sim.seed, "seed");
  simulate_cmd->add_option("--burn-in", sim.burn_in, "symbols discarded before output");
  simulate_cmd->add_option("--format", sim.format, "charwise or token")
      ->check(CLI::IsMember({"charwise", "token"}));
  simulate_cmd->add_option("--output", sim.output, "file name inside the output directory");
  simulate_cmd->add_option("-o,--out", out_dir, "output directory");

  auto* loglik = app.add_subcommand("loglik", "log-likelihood of a given tree");
  add_sequence_options(loglik, seq);
  loglik->add_option("--tree", tree_path, "tree file")->required();
  loglik->add_option("-o,--out", out_dir, "output directory");

  auto* plot = app.add_subcommand("plot", "render a champions or bootstrap CSV as SVG");
  plot->add_option("csv", csv_path, "CSV written by champions or smc")->required();
  plot->add_option("-o,--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*champions) return cmd_champions(seq, out_dir, out);
    if (*smc_cmd) return cmd_smc(seq, smc, out_dir, out);
    if (*simulate_cmd) return cmd_simulate(sim, out_dir, out);
    if (*loglik) return cmd_loglik(seq, tree_path, out_dir, out);
    if (*plot) return cmd_plot(csv_path, out_dir, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace smc::cli
