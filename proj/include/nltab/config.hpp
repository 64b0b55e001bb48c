#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nltab/errors.hpp"

namespace nltab {

// Lexical class lists consulted by tableau rule guards and the conversion
// pipeline. These are data, not ground truth: the shipped defaults cover the
// bundled corpus and can be replaced wholesale from a config file.
struct Lexicon {
  std::set<std::string> existential_quantifiers = {"een", "a",  "some", "s",
                                                   "het", "de", "the",  "wat"};
  std::set<std::string> universal_quantifiers = {"alle", "elke", "ieder", "iedere", "every", "all"};
  std::set<std::string> negative_quantifiers = {"geen", "no"};
  std::set<std::string> auxiliaries = {"zijn", "be", "worden", "staan", "hebben",
                                       "aan_het", "te", "om", "gaan", "do"};
  std::set<std::string> copulas = {"zijn", "be"};
  std::set<std::string> expletives = {"er", "there"};
  std::set<std::string> relative_pronouns = {"die", "dat", "wie", "who", "that", "which"};
  std::set<std::string> passive_markers = {"door", "by"};
  std::set<std::string> coordinators = {"en", "of", "and", "or"};
  std::set<std::string> non_subsective_adjectives = {"nep", "voormalig", "fake", "former"};
  std::set<std::string> determiner_lemmas = {"een", "de", "het", "geen", "alle", "elke",
                                             "ieder", "iedere", "s", "a", "the", "every",
                                             "no", "some", "wat"};

  bool is_quantifier(const std::string& lemma) const {
    return existential_quantifiers.count(lemma) || universal_quantifiers.count(lemma) ||
           negative_quantifiers.count(lemma);
  }
  bool is_subsective(const std::string& lemma, const std::string& pos) const {
    if (non_subsective_adjectives.count(lemma)) return false;
    return pos.rfind("JJ", 0) == 0;
  }
};

struct Config {
  // Tableau budgets.
  int max_rule_applications = 800;
  int max_nodes = 200;
  // Term fixing budget per sentence.
  int fix_budget = 1000;
  // Strict s-feature matching in tableau term comparison.
  bool strict_features = false;
  // Learned relations participate in hypernym closure (off: direct lookup).
  bool learned_transitive = false;
  // Abduction search bounds.
  int abduction_prover_calls = 200;
  int abduction_max_set_size = 3;
  int abduction_max_phrase_words = 4;
  // Disabled tableau rules by name.
  std::set<std::string> disabled_rules;

  Lexicon lexicon;
};

namespace detail {

inline std::set<std::string> split_words(const std::string& s) {
  std::set<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.insert(w);
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ParseError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace detail

// Key-value config: one `key = value` per line, '#' comments, word lists
// space-separated. Unknown keys are rejected so typos fail loudly.
inline void apply_config_line(Config& cfg, const std::string& key, const std::string& value) {
  if (key == "max_rule_applications") cfg.max_rule_applications = std::stoi(value);
  else if (key == "max_nodes") cfg.max_nodes = std::stoi(value);
  else if (key == "fix_budget") cfg.fix_budget = std::stoi(value);
  else if (key == "strict_features") cfg.strict_features = detail::parse_bool(value, key);
  else if (key == "learned_transitive") cfg.learned_transitive = detail::parse_bool(value, key);
  else if (key == "abduction_prover_calls") cfg.abduction_prover_calls = std::stoi(value);
  else if (key == "abduction_max_set_size") cfg.abduction_max_set_size = std::stoi(value);
  else if (key == "abduction_max_phrase_words") cfg.abduction_max_phrase_words = std::stoi(value);
  else if (key == "existential_quantifiers") cfg.lexicon.existential_quantifiers = detail::split_words(value);
  else if (key == "universal_quantifiers") cfg.lexicon.universal_quantifiers = detail::split_words(value);
  else if (key == "negative_quantifiers") cfg.lexicon.negative_quantifiers = detail::split_words(value);
  else if (key == "auxiliaries") cfg.lexicon.auxiliaries = detail::split_words(value);
  else if (key == "copulas") cfg.lexicon.copulas = detail::split_words(value);
  else if (key == "expletives") cfg.lexicon.expletives = detail::split_words(value);
  else if (key == "relative_pronouns") cfg.lexicon.relative_pronouns = detail::split_words(value);
  else if (key == "passive_markers") cfg.lexicon.passive_markers = detail::split_words(value);
  else if (key == "coordinators") cfg.lexicon.coordinators = detail::split_words(value);
  else if (key == "non_subsective_adjectives") cfg.lexicon.non_subsective_adjectives = detail::split_words(value);
  else if (key == "determiner_lemmas") cfg.lexicon.determiner_lemmas = detail::split_words(value);
  else if (key.rfind("rule.", 0) == 0) {
    std::string rule = key.substr(5);
    if (detail::parse_bool(value, key)) cfg.disabled_rules.erase(rule);
    else cfg.disabled_rules.insert(rule);
  } else {
    throw ParseError("unknown config key: " + key);
  }
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError("config line " + std::to_string(lineno) + " is not 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

// Penn-style pos tag -> WordNet pos class (n/v/a/r); "" when none applies.
inline std::string pos_class_of_tag(const std::string& tag) {
  if (tag.rfind("NN", 0) == 0) return "n";
  if (tag.rfind("VB", 0) == 0 || tag == "MD") return "v";
  if (tag.rfind("JJ", 0) == 0) return "a";
  if (tag.rfind("RB", 0) == 0 || tag == "WRB") return "r";
  return "";
}

}  // namespace nltab
