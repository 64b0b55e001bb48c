#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nltab/errors.hpp"
#include "nltab/term.hpp"
#include "nltab/types.hpp"

namespace nltab {

// ---------------------------------------------------------------------------
// Pre-parsed syntactic terms are ingested from record files; the parsers
// themselves stay outside this codebase. Record format (UTF-8, records
// separated by blank lines):
//   #id <id> #prov <alpino|npn|manual> #text <raw sentence>
//   #stage <syn|llf>              (optional, defaults to syn)
//   <canonical term, may span lines>
//   #lemma <token> <tagset> <tag> <lemma>   (zero or more)
// ---------------------------------------------------------------------------

enum class Provenance { Alpino, Npn, Manual };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Alpino: return "alpino";
    case Provenance::Npn: return "npn";
    case Provenance::Manual: return "manual";
  }
  return "manual";
}

inline Provenance provenance_from(const std::string& s) {
  if (s == "alpino") return Provenance::Alpino;
  if (s == "npn") return Provenance::Npn;
  if (s == "manual") return Provenance::Manual;
  throw ParseError("unknown provenance: " + s);
}

struct LemmaInfo {
  std::string lemma;
  std::string tagset;  // alpino | universal | penn
  std::string tag;
};

struct SyntacticDoc {
  std::string sentence_id;
  std::string raw_text;
  Provenance provenance = Provenance::Manual;
  std::string stage = "syn";  // syn | llf
  TermPtr term;
  std::map<std::string, LemmaInfo> lemma_map;  // token -> lemma entry
};

struct TagMap {
  std::string source_tagset;                  // alpino | universal
  std::map<std::string, std::string> entries;  // source tag -> Penn-style tag
};

inline const std::set<std::string>& penn_tags() {
  static const std::set<std::string> tags = {
      "NN",  "NNS", "NNP", "NNPS", "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ",
      "JJ",  "JJR", "JJS", "RB",   "RBR", "RBS", "IN",  "DT",  "PRP", "PRP$",
      "CD",  "CC",  "TO",  "UH",   "FW",  "SYM", "MD",  "EX",  "WDT", "WP",
      "WRB", "RP",  "POS", "PDT",  "LS",  ".",   "ENT"};
  return tags;
}

// Universal POS -> Penn. Fixed once here and exercised by round-tripping the
// bundled corpus.
inline TagMap universal_tagmap() {
  return TagMap{"universal",
                {{"NOUN", "NN"}, {"PROPN", "NNP"}, {"VERB", "VB"}, {"AUX", "VB"},
                 {"ADJ", "JJ"},  {"ADV", "RB"},    {"ADP", "IN"},  {"DET", "DT"},
                 {"PRON", "PRP"}, {"NUM", "CD"},   {"CCONJ", "CC"}, {"SCONJ", "IN"},
                 {"PART", "RP"}, {"INTJ", "UH"},   {"SYM", "SYM"}, {"PUNCT", "."},
                 {"X", "FW"}}};
}

inline TagMap alpino_tagmap() {
  return TagMap{"alpino",
                {{"n", "NN"},   {"ww", "VB"},  {"adj", "JJ"}, {"bw", "RB"},
                 {"vz", "IN"},  {"lid", "DT"}, {"vnw", "PRP"}, {"tw", "CD"},
                 {"vg", "CC"},  {"tsw", "UH"}, {"spec", "FW"}, {"let", "."},
                 {"mwu", "FW"}}};
}

// ---------------------------------------------------------------------------
// Coordination instantiation. Coordinators arrive with the schematic type
// α->α->α; the concrete type is inferred locally from sibling arguments and
// never kept schematic downstream.
// ---------------------------------------------------------------------------

namespace detail {

inline const std::string kSchematicAtom = "α";

inline bool ty_contains_schematic(const TyPtr& t) {
  if (t->is_atom()) return t->name == kSchematicAtom;
  return ty_contains_schematic(t->arg) || ty_contains_schematic(t->res);
}

inline bool term_contains_schematic(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return false;
    case Term::Kind::Const: return ty_contains_schematic(t->ty);
    case Term::Kind::App:
      return term_contains_schematic(t->fun) || term_contains_schematic(t->arg);
    case Term::Kind::Abs:
      return ty_contains_schematic(t->ty) || term_contains_schematic(t->body);
  }
  return false;
}

inline TyPtr ty_subst_schematic(const TyPtr& t, const TyPtr& image) {
  if (t->is_atom()) return t->name == kSchematicAtom ? image : t;
  return ty_fun(ty_subst_schematic(t->arg, image), ty_subst_schematic(t->res, image));
}

inline TermPtr term_subst_schematic(const TermPtr& t, const TyPtr& image) {
  switch (t->kind) {
    case Term::Kind::Var: return t;
    case Term::Kind::Const: return cnst(t->name, t->pos, ty_subst_schematic(t->ty, image));
    case Term::Kind::App:
      return app(term_subst_schematic(t->fun, image), term_subst_schematic(t->arg, image));
    case Term::Kind::Abs:
      return lam(t->name, ty_subst_schematic(t->ty, image), term_subst_schematic(t->body, image));
  }
  return t;
}

// Structural match of a pattern type (may mention α) against a ground type,
// accumulating the unique α binding.
inline bool match_schematic(const TyPtr& pattern, const TyPtr& ground, TyPtr& binding) {
  if (pattern->is_atom() && pattern->name == kSchematicAtom) {
    if (!binding) {
      binding = ground;
      return true;
    }
    return ty_equal(binding, ground);
  }
  if (pattern->kind != ground->kind) return false;
  if (pattern->is_atom())
    return pattern->name == ground->name &&
           (pattern->feature.empty() || ground->feature.empty() ||
            pattern->feature == ground->feature);
  return match_schematic(pattern->arg, ground->arg, binding) &&
         match_schematic(pattern->res, ground->res, binding);
}

inline std::pair<TermPtr, TyPtr> infer_instantiate(const TermPtr& t, TypeCtx& ctx) {
  switch (t->kind) {
    case Term::Kind::Var: {
      TyPtr ty = ctx_lookup(ctx, t->name);
      if (!ty) throw UnboundVariable(t->name);
      return {t, ty};
    }
    case Term::Kind::Const: return {t, t->ty};
    case Term::Kind::Abs: {
      ctx.emplace_back(t->name, t->ty);
      auto [body, tb] = infer_instantiate(t->body, ctx);
      ctx.pop_back();
      return {lam(t->name, t->ty, body), ty_fun(t->ty, tb)};
    }
    case Term::Kind::App: {
      auto [f, tf] = infer_instantiate(t->fun, ctx);
      auto [a, ta] = infer_instantiate(t->arg, ctx);
      if (ty_contains_schematic(ta))
        throw ValidationError("coordination type cannot be instantiated from a schematic argument");
      if (ty_contains_schematic(tf)) {
        if (!tf->is_fun()) throw ValidationError("schematic non-function type");
        TyPtr binding;
        if (!match_schematic(tf->arg, ta, binding) || !binding)
          throw ValidationError("no most-general coordination instantiation for argument of type " +
                                print_ty(ta));
        f = term_subst_schematic(f, binding);
        tf = ty_subst_schematic(tf, binding);
      }
      if (!tf->is_fun()) throw TypeMismatch("applying non-function of type " + print_ty(tf));
      if (!ty_unifies(tf->arg, ta))
        throw TypeMismatch("expected argument of type " + print_ty(tf->arg) + ", got " +
                           print_ty(ta));
      return {app(f, a), tf->res};
    }
  }
  throw InternalError("unreachable term kind");
}

}  // namespace detail

// Resolves every schematic coordination type in t by local inference;
// ValidationError when an occurrence stays unresolved.
inline TermPtr instantiate_coordination(const TermPtr& t) {
  if (!detail::term_contains_schematic(t)) return t;
  TypeCtx ctx;
  auto [out, ty] = detail::infer_instantiate(t, ctx);
  (void)ty;
  if (detail::term_contains_schematic(out))
    throw ValidationError("unresolved schematic coordination type");
  return out;
}

// ---------------------------------------------------------------------------
// Record IO
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline SyntacticDoc parse_record(const std::vector<std::string>& lines) {
  SyntacticDoc doc;
  std::string term_text;
  bool saw_header = false;
  for (const auto& line : lines) {
    if (line.rfind("#id", 0) == 0) {
      std::istringstream in(line);
      std::string kw;
      in >> kw >> doc.sentence_id;
      in >> kw;
      if (kw != "#prov") throw ParseError("record header missing #prov: " + line);
      std::string prov;
      in >> prov;
      doc.provenance = provenance_from(prov);
      in >> kw;
      if (kw != "#text") throw ParseError("record header missing #text: " + line);
      std::getline(in, doc.raw_text);
      size_t start = doc.raw_text.find_first_not_of(' ');
      doc.raw_text = start == std::string::npos ? "" : doc.raw_text.substr(start);
      saw_header = true;
    } else if (line.rfind("#stage", 0) == 0) {
      auto words = split_ws(line);
      if (words.size() != 2) throw ParseError("malformed #stage line: " + line);
      doc.stage = words[1];
    } else if (line.rfind("#lemma", 0) == 0) {
      auto words = split_ws(line);
      if (words.size() != 5) throw ParseError("malformed #lemma line: " + line);
      doc.lemma_map[words[1]] = LemmaInfo{words[4], words[2], words[3]};
    } else if (line.rfind('#', 0) == 0) {
      throw ParseError("unknown directive: " + line);
    } else {
      term_text += line;
      term_text += '\n';
    }
  }
  if (!saw_header) throw ParseError("record missing #id header");
  if (term_text.find_first_not_of(" \t\n\r") == std::string::npos)
    throw ParseError("record " + doc.sentence_id + " has no term");
  doc.term = parse_term(term_text);
  return doc;
}

inline void fill_missing_lemmas(SyntacticDoc& doc, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Const:
      if (!doc.lemma_map.count(t->name))
        doc.lemma_map[t->name] = LemmaInfo{t->name, "penn", t->pos};
      break;
    case Term::Kind::App:
      fill_missing_lemmas(doc, t->fun);
      fill_missing_lemmas(doc, t->arg);
      break;
    case Term::Kind::Abs: fill_missing_lemmas(doc, t->body); break;
    default: break;
  }
}

inline void check_term_atoms(const TermPtr& t, const TypeRegistry& reg) {
  switch (t->kind) {
    case Term::Kind::Const: check_atoms(t->ty, reg, "constant " + t->name); break;
    case Term::Kind::App:
      check_term_atoms(t->fun, reg);
      check_term_atoms(t->arg, reg);
      break;
    case Term::Kind::Abs:
      check_atoms(t->ty, reg, "binder " + t->name);
      check_term_atoms(t->body, reg);
      break;
    default: break;
  }
}

}  // namespace detail

struct IngestStats {
  int parsed = 0;
  int skipped = 0;
  std::vector<std::string> messages;
};

// Loads and validates syntactic records. Invalid records are skipped and
// logged, mirroring parser coverage gaps; the harness later defaults the
// affected problems to neutral.
inline std::vector<SyntacticDoc> load_syntactic(std::istream& in, IngestStats* stats = nullptr,
                                                std::ostream& log = std::clog) {
  std::vector<SyntacticDoc> docs;
  std::vector<std::string> record;
  auto flush = [&](std::vector<std::string>& lines) {
    if (lines.empty()) return;
    std::string id = "<unknown>";
    try {
      SyntacticDoc doc = detail::parse_record(lines);
      id = doc.sentence_id;
      doc.term = instantiate_coordination(doc.term);
      type_of(doc.term);
      if (doc.stage == "syn") {
        if (!check_linear(doc.term))
          throw ValidationError("term is not linear");
        detail::check_term_atoms(doc.term, syntactic_registry());
      } else {
        detail::check_term_atoms(doc.term, semantic_registry());
      }
      detail::fill_missing_lemmas(doc, doc.term);
      docs.push_back(std::move(doc));
      if (stats) ++stats->parsed;
    } catch (const Error& e) {
      std::string msg = "skipping record " + id + ": " + e.what();
      log << msg << '\n';
      if (stats) {
        ++stats->skipped;
        stats->messages.push_back(msg);
      }
    }
    lines.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush(record);
    } else {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      record.push_back(line);
    }
  }
  flush(record);
  return docs;
}

inline std::vector<SyntacticDoc> load_syntactic(const std::string& path,
                                                IngestStats* stats = nullptr,
                                                std::ostream& log = std::clog) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open record file: " + path);
  return load_syntactic(in, stats, log);
}

inline std::string serialize_doc(const SyntacticDoc& doc) {
  std::ostringstream out;
  out << "#id " << doc.sentence_id << " #prov " << to_string(doc.provenance) << " #text "
      << doc.raw_text << '\n';
  if (doc.stage != "syn") out << "#stage " << doc.stage << '\n';
  out << print_term(doc.term) << '\n';
  for (const auto& [token, info] : doc.lemma_map)
    out << "#lemma " << token << ' ' << info.tagset << ' ' << info.tag << ' ' << info.lemma
        << '\n';
  return out.str();
}

inline void write_docs(std::ostream& out, const std::vector<SyntacticDoc>& docs) {
  bool first = true;
  for (const auto& doc : docs) {
    if (!first) out << '\n';
    out << serialize_doc(doc);
    first = false;
  }
}

// ---------------------------------------------------------------------------
// Tag normalization
// ---------------------------------------------------------------------------

namespace detail {

inline std::string normalize_tag(const std::string& tag, const TagMap& map) {
  auto it = map.entries.find(tag);
  if (it != map.entries.end()) return it->second;
  if (penn_tags().count(tag)) return tag;  // idempotent on normalized input
  throw UnknownTag(tag);
}

inline TermPtr normalize_term_tags(const TermPtr& t, const TagMap& map) {
  switch (t->kind) {
    case Term::Kind::Var: return t;
    case Term::Kind::Const: return cnst(t->name, normalize_tag(t->pos, map), t->ty);
    case Term::Kind::App:
      return app(normalize_term_tags(t->fun, map), normalize_term_tags(t->arg, map));
    case Term::Kind::Abs: return lam(t->name, t->ty, normalize_term_tags(t->body, map));
  }
  return t;
}

}  // namespace detail

// Replaces every constant's pos tag by its Penn-style image.
inline SyntacticDoc normalize_tags(const SyntacticDoc& doc, const TagMap& map) {
  SyntacticDoc out = doc;
  out.term = detail::normalize_term_tags(doc.term, map);
  return out;
}

}  // namespace nltab
