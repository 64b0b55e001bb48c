#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nltab/errors.hpp"
#include "nltab/types.hpp"

namespace nltab {

// λ-terms: variables, typed lexical constants, applications and abstractions.
// Terms are immutable after construction and freely shared.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Const, App, Abs };

  Kind kind;
  std::string name;  // Var name, Const lemma, Abs bound-variable name
  std::string pos;   // Const pos tag
  TyPtr ty;          // Const type, Abs bound-variable type
  TermPtr fun, arg;  // App
  TermPtr body;      // Abs

  bool is_var() const { return kind == Kind::Var; }
  bool is_const() const { return kind == Kind::Const; }
  bool is_app() const { return kind == Kind::App; }
  bool is_abs() const { return kind == Kind::Abs; }
};

inline TermPtr var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->name = std::move(name);
  return t;
}

inline TermPtr cnst(std::string lemma, std::string pos, TyPtr ty) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Const;
  t->name = std::move(lemma);
  t->pos = std::move(pos);
  t->ty = std::move(ty);
  return t;
}

inline TermPtr cnst(std::string lemma, std::string pos, const std::string& ty) {
  return cnst(std::move(lemma), std::move(pos), parse_ty(ty));
}

inline TermPtr app(TermPtr f, TermPtr a) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::App;
  t->fun = std::move(f);
  t->arg = std::move(a);
  return t;
}

template <typename... Rest>
inline TermPtr app(TermPtr f, TermPtr a, TermPtr b, Rest... rest) {
  return app(app(std::move(f), std::move(a)), std::move(b), std::move(rest)...);
}

inline TermPtr lam(std::string x, TyPtr ty, TermPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Abs;
  t->name = std::move(x);
  t->ty = std::move(ty);
  t->body = std::move(body);
  return t;
}

inline TermPtr lam(std::string x, const std::string& ty, TermPtr body) {
  return lam(std::move(x), parse_ty(ty), std::move(body));
}

// Application spine: f a b c  ->  head f, args [a, b, c].
inline TermPtr spine_head(const TermPtr& t) {
  TermPtr cur = t;
  while (cur->is_app()) cur = cur->fun;
  return cur;
}

inline std::vector<TermPtr> spine_args(const TermPtr& t) {
  std::vector<TermPtr> args;
  TermPtr cur = t;
  while (cur->is_app()) {
    args.push_back(cur->arg);
    cur = cur->fun;
  }
  std::reverse(args.begin(), args.end());
  return args;
}

inline size_t term_size(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return 1;
    case Term::Kind::App: return 1 + term_size(t->fun) + term_size(t->arg);
    case Term::Kind::Abs: return 1 + term_size(t->body);
  }
  return 0;
}

inline void collect_free_vars(const TermPtr& t, std::set<std::string>& bound,
                              std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      break;
    case Term::Kind::Const: break;
    case Term::Kind::App:
      collect_free_vars(t->fun, bound, out);
      collect_free_vars(t->arg, bound, out);
      break;
    case Term::Kind::Abs: {
      bool was = bound.count(t->name) > 0;
      bound.insert(t->name);
      collect_free_vars(t->body, bound, out);
      if (!was) bound.erase(t->name);
      break;
    }
  }
}

inline std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  collect_free_vars(t, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// α-equivalence. Bound names are irrelevant; constants compare by lemma,
// pos tag and type. `exact_types` toggles strict feature comparison.
// ---------------------------------------------------------------------------

namespace detail {

inline bool alpha_eq_impl(const TermPtr& a, const TermPtr& b,
                          std::vector<std::pair<std::string, std::string>>& binders,
                          bool exact_types) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: {
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
        bool la = it->first == a->name, lb = it->second == b->name;
        if (la || lb) return la && lb;
      }
      return a->name == b->name;  // both free
    }
    case Term::Kind::Const:
      if (a->name != b->name || a->pos != b->pos) return false;
      return exact_types ? ty_equal(a->ty, b->ty) : ty_unifies(a->ty, b->ty);
    case Term::Kind::App:
      return alpha_eq_impl(a->fun, b->fun, binders, exact_types) &&
             alpha_eq_impl(a->arg, b->arg, binders, exact_types);
    case Term::Kind::Abs: {
      if (exact_types ? !ty_equal(a->ty, b->ty) : !ty_unifies(a->ty, b->ty)) return false;
      binders.emplace_back(a->name, b->name);
      bool ok = alpha_eq_impl(a->body, b->body, binders, exact_types);
      binders.pop_back();
      return ok;
    }
  }
  return false;
}

}  // namespace detail

inline bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  std::vector<std::pair<std::string, std::string>> binders;
  return detail::alpha_eq_impl(a, b, binders, true);
}

inline bool alpha_eq_lenient(const TermPtr& a, const TermPtr& b) {
  std::vector<std::pair<std::string, std::string>> binders;
  return detail::alpha_eq_impl(a, b, binders, false);
}

// ---------------------------------------------------------------------------
// Typing. type_of computes the unique type under a binding context;
// application requires the argument type to unify with the function domain
// (underspecified features match anything).
// ---------------------------------------------------------------------------

using TypeCtx = std::vector<std::pair<std::string, TyPtr>>;

inline TyPtr ctx_lookup(const TypeCtx& ctx, const std::string& name) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->first == name) return it->second;
  return nullptr;
}

inline TyPtr type_of(const TermPtr& t, TypeCtx& ctx) {
  switch (t->kind) {
    case Term::Kind::Var: {
      TyPtr ty = ctx_lookup(ctx, t->name);
      if (!ty) throw UnboundVariable(t->name);
      return ty;
    }
    case Term::Kind::Const: return t->ty;
    case Term::Kind::App: {
      TyPtr tf = type_of(t->fun, ctx);
      TyPtr ta = type_of(t->arg, ctx);
      if (!tf->is_fun())
        throw TypeMismatch("applying non-function of type " + print_ty(tf));
      if (!ty_unifies(tf->arg, ta))
        throw TypeMismatch("expected argument of type " + print_ty(tf->arg) + ", got " +
                           print_ty(ta));
      return tf->res;
    }
    case Term::Kind::Abs: {
      ctx.emplace_back(t->name, t->ty);
      TyPtr tb = type_of(t->body, ctx);
      ctx.pop_back();
      return ty_fun(t->ty, tb);
    }
  }
  throw InternalError("unreachable term kind");
}

inline TyPtr type_of(const TermPtr& t) {
  TypeCtx ctx;
  return type_of(t, ctx);
}

inline bool well_typed(const TermPtr& t) {
  try {
    type_of(t);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Counts free occurrences of `name` in t (shadowing-aware).
inline int count_occurrences(const TermPtr& t, const std::string& name) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name == name ? 1 : 0;
    case Term::Kind::Const: return 0;
    case Term::Kind::App:
      return count_occurrences(t->fun, name) + count_occurrences(t->arg, name);
    case Term::Kind::Abs:
      return t->name == name ? 0 : count_occurrences(t->body, name);
  }
  return 0;
}

// True iff every Abs-bound variable occurs exactly once in its body.
inline bool check_linear(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return true;
    case Term::Kind::App: return check_linear(t->fun) && check_linear(t->arg);
    case Term::Kind::Abs:
      return count_occurrences(t->body, t->name) == 1 && check_linear(t->body);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution and β-reduction.
// ---------------------------------------------------------------------------

inline std::atomic<uint64_t> fresh_counter{0};

inline std::string fresh_name(const std::string& base) {
  std::string core = base;
  size_t tick = core.find('\'');
  if (tick != std::string::npos) core.resize(tick);
  return core + "'" + std::to_string(++fresh_counter);
}

inline TermPtr rename_free(const TermPtr& t, const std::string& from, const std::string& to) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name == from ? var(to) : t;
    case Term::Kind::Const: return t;
    case Term::Kind::App: return app(rename_free(t->fun, from, to), rename_free(t->arg, from, to));
    case Term::Kind::Abs:
      if (t->name == from) return t;
      return lam(t->name, t->ty, rename_free(t->body, from, to));
  }
  return t;
}

inline TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s,
                          const TyPtr& declared_ty = nullptr) {
  if (declared_ty) {
    TyPtr ts = type_of(s);
    if (!ty_unifies(ts, declared_ty))
      throw TypeMismatch("substituting " + print_ty(ts) + " for variable of type " +
                         print_ty(declared_ty));
  }
  switch (t->kind) {
    case Term::Kind::Var: return t->name == x ? s : t;
    case Term::Kind::Const: return t;
    case Term::Kind::App: return app(substitute(t->fun, x, s), substitute(t->arg, x, s));
    case Term::Kind::Abs: {
      if (t->name == x) return t;
      if (count_occurrences(t->body, x) == 0) return t;
      if (free_vars(s).count(t->name)) {
        std::string y = fresh_name(t->name);
        TermPtr body = rename_free(t->body, t->name, y);
        return lam(y, t->ty, substitute(body, x, s));
      }
      return lam(t->name, t->ty, substitute(t->body, x, s));
    }
  }
  return t;
}

namespace detail {

constexpr uint64_t kBetaFuel = 200000;

inline TermPtr normalize(const TermPtr& t, uint64_t& fuel) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return t;
    case Term::Kind::Abs: return lam(t->name, t->ty, normalize(t->body, fuel));
    case Term::Kind::App: {
      // Normal order: reduce the head to an abstraction first if possible.
      TermPtr f = t->fun;
      while (true) {
        if (f->is_app()) {
          TermPtr inner = normalize(f, fuel);
          if (inner->is_abs()) {
            f = inner;
            continue;
          }
          return app(inner, normalize(t->arg, fuel));
        }
        if (f->is_abs()) {
          if (fuel-- == 0) throw InternalError("β-reduction fuel exhausted");
          return normalize(substitute(f->body, f->name, t->arg), fuel);
        }
        return app(f, normalize(t->arg, fuel));
      }
    }
  }
  return t;
}

}  // namespace detail

// β-normal form under normal-order reduction; unique up to α-equivalence
// for well-typed simply-typed terms.
inline TermPtr beta_reduce(const TermPtr& t) {
  uint64_t fuel = detail::kBetaFuel;
  return detail::normalize(t, fuel);
}

// Single η-contraction at the root: λx. f x  ->  f  when x ∉ FV(f).
inline TermPtr eta_contract_root(const TermPtr& t) {
  if (t->is_abs() && t->body->is_app() && t->body->arg->is_var() &&
      t->body->arg->name == t->name && count_occurrences(t->body->fun, t->name) == 0)
    return t->body->fun;
  return t;
}

// ---------------------------------------------------------------------------
// Canonical serialization: parenthesised prefix notation with typed
// constants, whitespace-insensitive, parse∘print = identity.
//   (app (const "zwemmen" VB "np->s") (const "eenden" NN "np"))
//   (lam x "np" (var x))
// ---------------------------------------------------------------------------

namespace detail {

struct TermParser {
  const std::string& src;
  size_t pos = 0;

  explicit TermParser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                src[pos] == '\r'))
      ++pos;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= src.size() || src[pos] != c)
      throw ParseError(std::string("expected '") + c + "' at offset " + std::to_string(pos));
    ++pos;
  }

  std::string atom() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() && is_ident_char(src[pos])) ++pos;
    if (pos == start) throw ParseError("expected atom at offset " + std::to_string(pos));
    return src.substr(start, pos - start);
  }

  std::string quoted() {
    skip_ws();
    expect('"');
    std::string out;
    while (pos < src.size() && src[pos] != '"') {
      if (src[pos] == '\\' && pos + 1 < src.size()) ++pos;
      out += src[pos++];
    }
    expect('"');
    return out;
  }

  TermPtr term() {
    expect('(');
    std::string head = atom();
    TermPtr result;
    if (head == "var") {
      result = var(atom());
    } else if (head == "const") {
      std::string lemma = quoted();
      std::string tag = atom();
      std::string ty = quoted();
      result = cnst(lemma, tag, parse_ty(ty));
    } else if (head == "lam") {
      std::string x = atom();
      std::string ty = quoted();
      TermPtr body = term();
      result = lam(x, parse_ty(ty), body);
    } else if (head == "app") {
      TermPtr f = term();
      TermPtr a = term();
      result = app(f, a);
      skip_ws();
      while (pos < src.size() && src[pos] == '(') {  // n-ary sugar
        result = app(result, term());
        skip_ws();
      }
    } else {
      throw ParseError("unknown term head: " + head);
    }
    expect(')');
    return result;
  }
};

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline TermPtr parse_term(const std::string& s) {
  detail::TermParser p(s);
  p.skip_ws();
  TermPtr t = p.term();
  p.skip_ws();
  if (p.pos != s.size()) throw ParseError("trailing input after term");
  return t;
}

inline std::string print_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return "(var " + t->name + ")";
    case Term::Kind::Const:
      return "(const " + detail::quote(t->name) + " " + t->pos + " " +
             detail::quote(print_ty(t->ty)) + ")";
    case Term::Kind::App: return "(app " + print_term(t->fun) + " " + print_term(t->arg) + ")";
    case Term::Kind::Abs:
      return "(lam " + t->name + " " + detail::quote(print_ty(t->ty)) + " " +
             print_term(t->body) + ")";
  }
  return "";
}

// Compact display form used in proofs and diagnostics (not parsed back).
inline std::string display_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name;
    case Term::Kind::Const: return t->name;
    case Term::Kind::App: {
      std::string out = "(" + display_term(spine_head(t));
      for (const auto& a : spine_args(t)) out += " " + display_term(a);
      return out + ")";
    }
    case Term::Kind::Abs: return "(λ" + t->name + ". " + display_term(t->body) + ")";
  }
  return "";
}

}  // namespace nltab
