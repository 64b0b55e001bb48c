#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nltab/errors.hpp"

namespace nltab {

// A syntactic or semantic type: an atom (with optional feature, e.g. s:dcl)
// or a function type. One structure serves both calculi; linearity is a
// property of terms, not types.
struct Ty;
using TyPtr = std::shared_ptr<const Ty>;

struct Ty {
  enum class Kind { Atom, Fun };

  Kind kind;
  std::string name;     // atom name
  std::string feature;  // optional atom feature ("" = underspecified)
  TyPtr arg;            // Fun argument
  TyPtr res;            // Fun result

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_fun() const { return kind == Kind::Fun; }
};

inline TyPtr ty_atom(std::string name, std::string feature = "") {
  auto t = std::make_shared<Ty>();
  t->kind = Ty::Kind::Atom;
  t->name = std::move(name);
  t->feature = std::move(feature);
  return t;
}

inline TyPtr ty_fun(TyPtr arg, TyPtr res) {
  auto t = std::make_shared<Ty>();
  t->kind = Ty::Kind::Fun;
  t->arg = std::move(arg);
  t->res = std::move(res);
  return t;
}

inline bool ty_equal(const TyPtr& a, const TyPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->is_atom()) return a->name == b->name && a->feature == b->feature;
  return ty_equal(a->arg, b->arg) && ty_equal(a->res, b->res);
}

// Feature-lenient match: atoms with the same name unify when the features
// are equal or at least one side is underspecified.
inline bool ty_unifies(const TyPtr& a, const TyPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->is_atom()) {
    if (a->name != b->name) return false;
    return a->feature.empty() || b->feature.empty() || a->feature == b->feature;
  }
  return ty_unifies(a->arg, b->arg) && ty_unifies(a->res, b->res);
}

// Final result of a function type chain (the type itself if atomic).
inline const TyPtr& ty_result(const TyPtr& t) {
  const TyPtr* cur = &t;
  while ((*cur)->is_fun()) cur = &(*cur)->res;
  return *cur;
}

inline int ty_arity(const TyPtr& t) {
  int n = 0;
  const Ty* cur = t.get();
  while (cur->is_fun()) {
    ++n;
    cur = cur->res.get();
  }
  return n;
}

// ---------------------------------------------------------------------------
// Type syntax: right-associative "->" with parenthesised arguments,
// features attached to atoms with ":", e.g. "(np->s:dcl)->s".
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '\'' || static_cast<unsigned char>(c) >= 0x80;
}

struct TyParser {
  const std::string& src;
  size_t pos = 0;

  explicit TyParser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (src.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() && is_ident_char(src[pos])) ++pos;
    if (pos == start) throw ParseError("expected identifier in type at '" + src.substr(pos, 8) + "'");
    return src.substr(start, pos - start);
  }

  TyPtr primary() {
    skip_ws();
    if (eat("(")) {
      TyPtr t = type();
      if (!eat(")")) throw ParseError("expected ')' in type: " + src);
      return t;
    }
    std::string name = ident();
    std::string feature;
    if (pos < src.size() && src[pos] == ':') {
      ++pos;
      feature = ident();
    }
    return ty_atom(name, feature);
  }

  TyPtr type() {
    TyPtr lhs = primary();
    if (eat("->")) return ty_fun(lhs, type());
    return lhs;
  }
};

}  // namespace detail

inline TyPtr parse_ty(const std::string& s) {
  detail::TyParser p(s);
  TyPtr t = p.type();
  p.skip_ws();
  if (p.pos != s.size()) throw ParseError("trailing input in type: " + s);
  return t;
}

inline std::string print_ty(const TyPtr& t) {
  if (t->is_atom()) return t->feature.empty() ? t->name : t->name + ":" + t->feature;
  std::string lhs = print_ty(t->arg);
  if (t->arg->is_fun()) lhs = "(" + lhs + ")";
  return lhs + "->" + print_ty(t->res);
}

// ---------------------------------------------------------------------------
// Atom registries. The syntactic registry covers the parser atoms seen in
// ingested terms; the semantic registry is the LLF atom set {n, np, s, pp, pr}
// with optional s-features. Registries are data and can be extended.
// ---------------------------------------------------------------------------

struct TypeRegistry {
  std::set<std::string> atoms;
  std::set<std::string> s_features;  // features allowed on the "s" atom

  bool allows(const Ty& t) const {
    if (t.is_fun()) return false;
    if (!atoms.count(t.name)) return false;
    if (t.feature.empty()) return true;
    if (t.name == "s") return s_features.count(t.feature) > 0;
    return false;
  }
};

inline const TypeRegistry& syntactic_registry() {
  static const TypeRegistry reg{
      {"n",   "np",  "s",    "pp",  "pr",  "pron", "vnw", "vz",
       "tw",  "ahi", "ww",   "part", "ti", "oti",  "ap",  "adj",
       "bw",  "adv", "lid",  "det", "vg",  "tsw",  "let", "spec",
       "mwu", "num", "whq",  "rel", "inf", "cp",   "svan"},
      {"main", "sub", "dcl", "b", "pt", "pss", "ng", "to", "adj", "q", "wh", "whq", "v1"}};
  return reg;
}

inline const TypeRegistry& semantic_registry() {
  static const TypeRegistry reg{
      {"n", "np", "s", "pp", "pr"},
      {"dcl", "sub", "b", "pt", "pss", "ng", "to", "adj", "q", "wh", "main"}};
  return reg;
}

inline void check_atoms(const TyPtr& t, const TypeRegistry& reg, const std::string& context) {
  if (t->is_atom()) {
    if (!reg.allows(*t))
      throw ValidationError("atom '" + print_ty(t) + "' not in registry (" + context + ")");
    return;
  }
  check_atoms(t->arg, reg, context);
  check_atoms(t->res, reg, context);
}

}  // namespace nltab
