#pragma once

#include <algorithm>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nltab/errors.hpp"

namespace nltab {

// Lexical units are lemmas plus a WordNet pos class (n/v/a/r, "" = any);
// multiword units join their words with underscores.
struct LexUnit {
  std::string lemma;
  std::string pos_class;

  bool operator==(const LexUnit& o) const {
    return lemma == o.lemma && pos_class == o.pos_class;
  }
  bool operator<(const LexUnit& o) const {
    return lemma != o.lemma ? lemma < o.lemma : pos_class < o.pos_class;
  }
  bool matches(const LexUnit& o) const {
    return lemma == o.lemma &&
           (pos_class.empty() || o.pos_class.empty() || pos_class == o.pos_class);
  }
};

enum class RelKind { Subsumes, Disjoint, Synonym };

enum class RelProvenance { WordnetHyp, WordnetAnt, WordnetSim, WordnetDer, Learned };

struct LexRelation {
  RelKind kind;
  LexUnit lhs, rhs;
  RelProvenance provenance = RelProvenance::Learned;

  bool symmetric() const { return kind != RelKind::Subsumes; }
  LexRelation reversed() const { return LexRelation{kind, rhs, lhs, provenance}; }
  bool same_fact(const LexRelation& o) const {
    if (kind != o.kind) return false;
    if (lhs == o.lhs && rhs == o.rhs) return true;
    return symmetric() && lhs == o.rhs && rhs == o.lhs;
  }
};

inline std::string rel_symbol(RelKind k) {
  switch (k) {
    case RelKind::Subsumes: return "⊑";
    case RelKind::Disjoint: return "|";
    case RelKind::Synonym: return "≡";
  }
  return "?";
}

inline std::string to_string(const LexRelation& r) {
  return r.lhs.lemma + " " + rel_symbol(r.kind) + " " + r.rhs.lemma;
}

struct Synset {
  std::string synset_id;
  std::string pos;                                        // n | v | a | r
  std::vector<std::pair<std::string, int>> members;       // (word, sense number)
};

// ---------------------------------------------------------------------------
// Princeton-prologdb-style fact files:
//   s(SynsetId, WNum, 'word', Type, Sense, Tag).
//   hyp(Id1, Id2).   ant(Id1, W1, Id2, W2).   sim(Id1, Id2).   der(Id1, W1, Id2, W2).
// ---------------------------------------------------------------------------

namespace kbdetail {

inline std::string word_key(const std::string& word, const std::string& pos) {
  return word + "/" + pos;
}

struct KbBase {
  std::map<std::string, Synset> synsets;
  std::map<std::string, std::vector<std::string>> word_synsets;  // word/pos -> synset ids
  std::map<std::string, std::vector<std::string>> hypernyms;     // id -> hypernym ids
  std::map<std::string, std::vector<std::string>> similar;       // id -> similar ids (both ways)
  std::set<std::pair<std::string, std::string>> ant_pairs;       // word/pos pairs (both ways)
  std::set<std::pair<std::string, std::string>> der_pairs;       // word pairs (both ways)
};

inline std::string normalize_word(std::string w) {
  for (char& c : w)
    if (c == ' ') c = '_';
  return w;
}

struct RawFacts {
  std::vector<std::vector<std::string>> s, hyp, ant, sim, der;
};

inline bool parse_fact_line(const std::string& line, std::string& pred,
                            std::vector<std::string>& args) {
  size_t i = 0, n = line.size();
  auto skip_ws = [&] { while (i < n && (line[i] == ' ' || line[i] == '\t')) ++i; };
  skip_ws();
  size_t start = i;
  while (i < n && (isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
  pred = line.substr(start, i - start);
  skip_ws();
  if (pred.empty() || i >= n || line[i] != '(') return false;
  ++i;
  args.clear();
  std::string cur;
  bool in_quote = false;
  for (; i < n; ++i) {
    char c = line[i];
    if (in_quote) {
      if (c == '\'') {
        if (i + 1 < n && line[i + 1] == '\'') {  // escaped quote
          cur += '\'';
          ++i;
        } else {
          in_quote = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '\'') {
      in_quote = true;
    } else if (c == ',') {
      args.push_back(cur);
      cur.clear();
    } else if (c == ')') {
      args.push_back(cur);
      ++i;
      skip_ws();
      return i < n && line[i] == '.' && !in_quote;
    } else if (c != ' ' && c != '\t') {
      cur += c;
    }
  }
  return false;
}

}  // namespace kbdetail

struct KbLoadStats {
  int facts = 0;
  int malformed = 0;
};

class Kb {
 public:
  Kb()
      : base_(std::make_shared<kbdetail::KbBase>()),
        learned_(std::make_shared<std::vector<LexRelation>>()) {}

  Kb(std::shared_ptr<const kbdetail::KbBase> base,
     std::shared_ptr<const std::vector<LexRelation>> learned)
      : base_(std::move(base)), learned_(std::move(learned)) {}

  const kbdetail::KbBase& base() const { return *base_; }
  const std::vector<LexRelation>& learned() const { return *learned_; }

  // Copy-on-write overlay: the WordNet indices stay shared and untouched.
  Kb with_learned(const LexRelation& rel) const {
    for (const auto& r : *learned_)
      if (r.same_fact(rel)) return *this;  // idempotent
    auto next = std::make_shared<std::vector<LexRelation>>(*learned_);
    LexRelation r = rel;
    r.provenance = RelProvenance::Learned;
    next->push_back(std::move(r));
    return Kb(base_, next);
  }

  Kb with_learned(const std::vector<LexRelation>& rels) const {
    Kb out = *this;
    for (const auto& r : rels) out = out.with_learned(r);
    return out;
  }

  bool empty() const {
    return base_->synsets.empty() && learned_->empty();
  }

  std::optional<LexRelation> relation(const LexUnit& a, const LexUnit& b) const {
    bool syn = false, sub = false, dis = false;
    RelProvenance syn_prov = RelProvenance::WordnetSim;
    RelProvenance sub_prov = RelProvenance::WordnetHyp;
    RelProvenance dis_prov = RelProvenance::WordnetAnt;
    // Learned relations are consulted first and may cover multiword units.
    for (const auto& r : *learned_) {
      bool fwd = r.lhs.matches(a) && r.rhs.matches(b);
      bool bwd = r.lhs.matches(b) && r.rhs.matches(a);
      if (r.kind == RelKind::Subsumes && fwd) sub = true, sub_prov = RelProvenance::Learned;
      if (r.kind == RelKind::Synonym && (fwd || bwd)) syn = true, syn_prov = RelProvenance::Learned;
      if (r.kind == RelKind::Disjoint && (fwd || bwd)) dis = true, dis_prov = RelProvenance::Learned;
    }
    if (!syn && base_synonym(a, b, syn_prov)) syn = true;
    if (!sub && base_subsumes(a, b)) sub = true;
    if (!dis && base_disjoint(a, b)) dis = true;
    // Precedence: stronger information first, disjointness last.
    if (syn) return LexRelation{RelKind::Synonym, a, b, syn_prov};
    if (sub) return LexRelation{RelKind::Subsumes, a, b, sub_prov};
    if (dis) return LexRelation{RelKind::Disjoint, a, b, dis_prov};
    return std::nullopt;
  }

  bool infers(const LexUnit& a, const LexUnit& b) const {
    if (a.lemma == b.lemma) return true;
    auto rel = relation(a, b);
    return rel && (rel->kind == RelKind::Subsumes || rel->kind == RelKind::Synonym);
  }

  bool disjoint(const LexUnit& a, const LexUnit& b) const {
    auto rel = relation(a, b);
    return rel && rel->kind == RelKind::Disjoint;
  }

  bool synonym(const LexUnit& a, const LexUnit& b) const {
    auto rel = relation(a, b);
    return rel && rel->kind == RelKind::Synonym;
  }

 private:
  static const std::vector<std::string>& all_classes() {
    static const std::vector<std::string> classes = {"n", "v", "a", "r"};
    return classes;
  }

  std::vector<std::string> synsets_of(const LexUnit& u) const {
    std::vector<std::string> out;
    auto collect = [&](const std::string& pos) {
      auto it = base_->word_synsets.find(kbdetail::word_key(u.lemma, pos));
      if (it != base_->word_synsets.end())
        out.insert(out.end(), it->second.begin(), it->second.end());
    };
    if (!u.pos_class.empty()) collect(u.pos_class);
    else
      for (const auto& pos : all_classes()) collect(pos);
    return out;
  }

  // All-sense reading: the relation holds if it holds for ANY pair of senses.
  bool base_synonym(const LexUnit& a, const LexUnit& b, RelProvenance& prov) const {
    auto sa = synsets_of(a), sb = synsets_of(b);
    std::set<std::string> sbset(sb.begin(), sb.end());
    for (const auto& id : sa)
      if (sbset.count(id)) {
        prov = RelProvenance::WordnetSim;
        return true;  // shared synset
      }
    for (const auto& id : sa) {
      auto it = base_->similar.find(id);
      if (it == base_->similar.end()) continue;
      for (const auto& other : it->second)
        if (sbset.count(other)) {
          prov = RelProvenance::WordnetSim;
          return true;
        }
    }
    // Derivational morphosemantic links cross pos classes.
    if (base_->der_pairs.count({a.lemma, b.lemma}) || base_->der_pairs.count({b.lemma, a.lemma})) {
      prov = RelProvenance::WordnetDer;
      return true;
    }
    return false;
  }

  // Reflexive-transitive hypernym closure, cycle-guarded.
  bool base_subsumes(const LexUnit& a, const LexUnit& b) const {
    auto sa = synsets_of(a), sb = synsets_of(b);
    if (sa.empty() || sb.empty()) return false;
    std::set<std::string> targets(sb.begin(), sb.end());
    std::set<std::string> visited;
    std::deque<std::string> frontier(sa.begin(), sa.end());
    while (!frontier.empty()) {
      std::string id = frontier.front();
      frontier.pop_front();
      if (!visited.insert(id).second) continue;
      if (targets.count(id)) return true;
      auto it = base_->hypernyms.find(id);
      if (it == base_->hypernyms.end()) continue;
      for (const auto& up : it->second) frontier.push_back(up);
    }
    return false;
  }

  bool base_disjoint(const LexUnit& a, const LexUnit& b) const {
    auto check = [&](const std::string& pa, const std::string& pb) {
      return base_->ant_pairs.count(
                 {kbdetail::word_key(a.lemma, pa), kbdetail::word_key(b.lemma, pb)}) > 0 ||
             base_->ant_pairs.count(
                 {kbdetail::word_key(b.lemma, pb), kbdetail::word_key(a.lemma, pa)}) > 0;
    };
    std::vector<std::string> pas = a.pos_class.empty() ? all_classes()
                                                       : std::vector<std::string>{a.pos_class};
    std::vector<std::string> pbs = b.pos_class.empty() ? all_classes()
                                                       : std::vector<std::string>{b.pos_class};
    for (const auto& pa : pas)
      for (const auto& pb : pbs)
        if (pa == pb && check(pa, pb)) return true;  // ant requires matching class
    return false;
  }

  std::shared_ptr<const kbdetail::KbBase> base_;
  std::shared_ptr<const std::vector<LexRelation>> learned_;
};

// Spec-shaped free functions.
inline std::optional<LexRelation> relation(const LexUnit& a, const LexUnit& b, const Kb& kb) {
  return kb.relation(a, b);
}

inline Kb add_learned(const Kb& kb, const LexRelation& rel) { return kb.with_learned(rel); }

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace kbdetail {

inline void ingest_facts(std::istream& in, RawFacts& raw, KbLoadStats* stats, std::ostream& log) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    std::string pred;
    std::vector<std::string> args;
    bool ok = parse_fact_line(line, pred, args);
    size_t want = 0;
    std::vector<std::vector<std::string>>* bucket = nullptr;
    if (pred == "s") bucket = &raw.s, want = 6;
    else if (pred == "hyp") bucket = &raw.hyp, want = 2;
    else if (pred == "ant") bucket = &raw.ant, want = 4;
    else if (pred == "sim") bucket = &raw.sim, want = 2;
    else if (pred == "der") bucket = &raw.der, want = 4;
    if (!ok || !bucket || args.size() != want) {
      log << "malformed KB fact at line " << lineno << ": " << line << '\n';
      if (stats) ++stats->malformed;
      continue;
    }
    bucket->push_back(args);
    if (stats) ++stats->facts;
  }
}

inline Kb build_kb(const RawFacts& raw) {
  auto base = std::make_shared<KbBase>();
  std::map<std::pair<std::string, std::string>, std::string> word_at;  // (id, wnum) -> word/pos
  for (const auto& f : raw.s) {
    const std::string& id = f[0];
    std::string pos = f[3] == "s" ? "a" : f[3];  // satellite adjectives fold into 'a'
    std::string word = normalize_word(f[2]);
    Synset& syn = base->synsets[id];
    syn.synset_id = id;
    syn.pos = pos;
    syn.members.emplace_back(word, std::atoi(f[4].c_str()));
    base->word_synsets[word_key(word, pos)].push_back(id);
    word_at[{id, f[1]}] = word_key(word, pos);
  }
  for (const auto& f : raw.hyp) base->hypernyms[f[0]].push_back(f[1]);
  for (const auto& f : raw.sim) {
    base->similar[f[0]].push_back(f[1]);
    base->similar[f[1]].push_back(f[0]);
  }
  auto strip_pos = [](const std::string& key) { return key.substr(0, key.rfind('/')); };
  for (const auto& f : raw.ant) {
    auto a = word_at.find({f[0], f[1]});
    auto b = word_at.find({f[2], f[3]});
    if (a == word_at.end() || b == word_at.end()) continue;
    base->ant_pairs.insert({a->second, b->second});
    base->ant_pairs.insert({b->second, a->second});
  }
  for (const auto& f : raw.der) {
    auto a = word_at.find({f[0], f[1]});
    auto b = word_at.find({f[2], f[3]});
    if (a == word_at.end() || b == word_at.end()) continue;
    base->der_pairs.insert({strip_pos(a->second), strip_pos(b->second)});
    base->der_pairs.insert({strip_pos(b->second), strip_pos(a->second)});
  }
  return Kb(base, std::make_shared<std::vector<LexRelation>>());
}

}  // namespace kbdetail

inline Kb load_prolog_kb(const std::vector<std::string>& paths, KbLoadStats* stats = nullptr,
                         std::ostream& log = std::clog) {
  kbdetail::RawFacts raw;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open KB file: " + path);
    kbdetail::ingest_facts(in, raw, stats, log);
  }
  return kbdetail::build_kb(raw);
}

inline Kb load_prolog_kb(std::istream& in, KbLoadStats* stats = nullptr,
                         std::ostream& log = std::clog) {
  kbdetail::RawFacts raw;
  kbdetail::ingest_facts(in, raw, stats, log);
  return kbdetail::build_kb(raw);
}

// ---------------------------------------------------------------------------
// Learned-relation files: one relation per line, `⊑|≡|"|" <lhs> <rhs>`.
// ---------------------------------------------------------------------------

inline std::vector<LexRelation> parse_learned_relations(std::istream& in) {
  std::vector<LexRelation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string sym, lhs, rhs;
    if (!(ls >> sym)) continue;
    if (!(ls >> lhs >> rhs))
      throw ParseError("learned-relation line " + std::to_string(lineno) + " needs '<rel> <lhs> <rhs>'");
    RelKind kind;
    if (sym == "⊑") kind = RelKind::Subsumes;
    else if (sym == "≡") kind = RelKind::Synonym;
    else if (sym == "|") kind = RelKind::Disjoint;
    else throw ParseError("unknown relation symbol '" + sym + "' at line " + std::to_string(lineno));
    out.push_back(LexRelation{kind, LexUnit{lhs, ""}, LexUnit{rhs, ""}, RelProvenance::Learned});
  }
  return out;
}

inline std::vector<LexRelation> load_learned_relations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open learned-relation file: " + path);
  return parse_learned_relations(in);
}

inline void write_learned_relations(std::ostream& out, const std::vector<LexRelation>& rels) {
  for (const auto& r : rels)
    out << rel_symbol(r.kind) << ' ' << r.lhs.lemma << ' ' << r.rhs.lemma << '\n';
}

}  // namespace nltab
