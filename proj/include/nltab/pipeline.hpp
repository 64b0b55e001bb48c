#pragma once

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nltab/config.hpp"
#include "nltab/errors.hpp"
#include "nltab/ingest.hpp"
#include "nltab/term.hpp"
#include "nltab/types.hpp"

namespace nltab {

// ---------------------------------------------------------------------------
// Stage 1: type simplification. Syntactic atoms are mapped many-to-one onto
// LLF types; identity atoms keep their feature, everything else matches on
// (atom, feature) exactly. Unlisted atoms raise UnmappedAtom and the sentence
// later falls back to a neutral prediction.
// ---------------------------------------------------------------------------

struct TypeSimplificationMap {
  std::map<std::pair<std::string, std::string>, TyPtr> entries;
  std::set<std::string> identity;  // atoms mapped to themselves, feature kept
};

inline TypeSimplificationMap default_simplification_map() {
  TypeSimplificationMap m;
  m.identity = {"n", "np", "s", "pp", "pr"};
  auto add = [&](const std::string& atom, const std::string& feature, const std::string& image) {
    m.entries[{atom, feature}] = parse_ty(image);
  };
  add("s", "main", "s:dcl");
  add("s", "sub", "s:sub");
  add("vnw", "", "np");
  add("pron", "", "np");
  add("vz", "", "pr");
  add("tw", "", "np");
  add("ahi", "", "np->s:ng");
  add("ww", "", "np->s:b");
  add("part", "", "np->s:pt");
  add("ti", "", "np->s:to");
  add("oti", "", "np->s:to");
  add("ap", "", "np->s:adj");
  add("adj", "", "np->s:adj");
  return m;
}

inline TyPtr simplify_ty(const TyPtr& t, const TypeSimplificationMap& map) {
  if (t->is_fun()) return ty_fun(simplify_ty(t->arg, map), simplify_ty(t->res, map));
  auto it = map.entries.find({t->name, t->feature});
  if (it != map.entries.end()) return it->second;
  if (map.identity.count(t->name)) return t;
  throw UnmappedAtom(print_ty(t));
}

inline TermPtr simplify_term(const TermPtr& t, const TypeSimplificationMap& map) {
  switch (t->kind) {
    case Term::Kind::Var: return t;
    case Term::Kind::Const: return cnst(t->name, t->pos, simplify_ty(t->ty, map));
    case Term::Kind::App: return app(simplify_term(t->fun, map), simplify_term(t->arg, map));
    case Term::Kind::Abs: return lam(t->name, simplify_ty(t->ty, map), simplify_term(t->body, map));
  }
  return t;
}

inline TermPtr simplify(const SyntacticDoc& doc, const TypeSimplificationMap& map) {
  TermPtr out = simplify_term(doc.term, map);
  type_of(out);
  detail::check_term_atoms(out, semantic_registry());
  return out;
}

// ---------------------------------------------------------------------------
// Stage 2: term fixing. Exhaustive, outermost-first application of the
// fixing ruleset to a fixpoint; constants are replaced by their lemmas first.
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_atom_named(const TyPtr& t, const std::string& name) {
  return t->is_atom() && t->name == name;
}

inline bool is_vp_like(const TyPtr& t) {  // np -> s (features free)
  return t->is_fun() && is_atom_named(t->arg, "np") && is_atom_named(t->res, "s");
}

inline bool tag_is(const std::string& tag, const char* prefix) {
  return tag.rfind(prefix, 0) == 0;
}

inline bool is_modifier_tag(const std::string& tag) {
  return tag_is(tag, "JJ") || tag == "IN" || tag_is(tag, "VBN") || tag_is(tag, "VBG");
}

inline bool is_verbish_tag(const std::string& tag) {
  return tag_is(tag, "VB") || tag == "IN" || tag == "MD" || tag == "TO";
}

// Replaces the result type reached after `depth` argument positions.
inline TyPtr retype_after(const TyPtr& ty, int depth, const TyPtr& replacement) {
  if (depth == 0) return replacement;
  if (!ty->is_fun()) throw InternalError("retype_after ran past the type");
  return ty_fun(ty->arg, retype_after(ty->res, depth - 1, replacement));
}

// Replaces the domain at argument position `index` (0-based).
inline TyPtr retype_domain(const TyPtr& ty, int index, const TyPtr& domain) {
  if (!ty->is_fun()) throw InternalError("retype_domain ran past the type");
  if (index == 0) return ty_fun(domain, ty->res);
  return ty_fun(ty->arg, retype_domain(ty->res, index - 1, domain));
}

// Retypes the head constant of a modifier spine so the spine's final
// np->np becomes n->n (used when a determiner moves above the modifier).
inline TermPtr retype_modifier_to_n(const TermPtr& m) {
  if (m->is_const()) {
    int depth = ty_arity(m->ty);
    if (depth < 1) throw InternalError("modifier constant with atomic type");
    // the trailing np->np sits one level above the final result
    TyPtr nn = ty_fun(ty_atom("n"), ty_atom("n"));
    return cnst(m->name, m->pos, retype_after(m->ty, depth - 1, nn));
  }
  if (m->is_app()) return app(retype_modifier_to_n(m->fun), m->arg);
  throw InternalError("unsupported modifier shape in determiner raise");
}

inline TermPtr noun_head(const TermPtr& n) {
  if (n->is_app()) return noun_head(n->arg);
  return n;
}

struct FixEnv {
  const Config& config;
  std::map<std::string, std::string> lemma_of;  // token -> lemma
  std::ostream* log = nullptr;
  int applications = 0;

  void note(const std::string& msg) const {
    if (log) (*log) << msg << '\n';
  }
};

// Preorder rewrite of the first matching node; `matcher(t, ctx)` returns the
// replacement subterm or nullopt.
template <typename F>
std::optional<TermPtr> rewrite_first(const TermPtr& t, TypeCtx& ctx, F&& matcher,
                                     bool right_first = false) {
  if (auto r = matcher(t, ctx)) return r;
  switch (t->kind) {
    case Term::Kind::App: {
      if (right_first) {
        if (auto r = rewrite_first(t->arg, ctx, matcher, right_first)) return app(t->fun, *r);
        if (auto r = rewrite_first(t->fun, ctx, matcher, right_first)) return app(*r, t->arg);
      } else {
        if (auto r = rewrite_first(t->fun, ctx, matcher, right_first)) return app(*r, t->arg);
        if (auto r = rewrite_first(t->arg, ctx, matcher, right_first)) return app(t->fun, *r);
      }
      return std::nullopt;
    }
    case Term::Kind::Abs: {
      ctx.emplace_back(t->name, t->ty);
      auto r = rewrite_first(t->body, ctx, matcher, right_first);
      ctx.pop_back();
      if (r) return lam(t->name, t->ty, *r);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

inline TyPtr try_type_of(const TermPtr& t, TypeCtx& ctx) {
  try {
    return type_of(t, ctx);
  } catch (const Error&) {
    return nullptr;
  }
}

// (e) coordination distribution: C A B x ==> C (A x) (B x), β-reduced.
inline std::optional<TermPtr> match_distribute(const TermPtr& t, TypeCtx& ctx,
                                               const FixEnv& env) {
  if (!t->is_app() || !t->fun->is_app() || !t->fun->fun->is_app()) return std::nullopt;
  TermPtr head = t->fun->fun->fun;
  if (!head->is_const() || !env.config.lexicon.coordinators.count(head->name))
    return std::nullopt;
  TermPtr a = t->fun->fun->arg, b = t->fun->arg, x = t->arg;
  if (!a->is_abs() && !b->is_abs()) return std::nullopt;
  TermPtr a2 = beta_reduce(app(a, x));
  TermPtr b2 = beta_reduce(app(b, x));
  TyPtr ta = try_type_of(a2, ctx);
  if (!ta) return std::nullopt;
  TermPtr c2 = cnst(head->name, head->pos, ty_fun(ta, ty_fun(ta, ta)));
  return app(app(c2, a2), b2);
}

// (b) bare-NP quantification: a type-n argument in verb/preposition position
// gets an explicit quantifier (`een` singular, `s` plural) and the governing
// constant's domain is lifted n ==> np.
inline std::optional<TermPtr> match_bare_np(const TermPtr& t, TypeCtx& ctx, const FixEnv& env) {
  (void)env;
  if (!t->is_app()) return std::nullopt;
  TyPtr ta = try_type_of(t->arg, ctx);
  if (!ta || !is_atom_named(ta, "n")) return std::nullopt;
  TermPtr head = spine_head(t->fun);
  if (!head->is_const() || !is_verbish_tag(head->pos)) return std::nullopt;
  int index = static_cast<int>(spine_args(t->fun).size());
  TermPtr head2 = cnst(head->name, head->pos, retype_domain(head->ty, index, ty_atom("np")));
  TermPtr fun2 = head2;
  for (const auto& arg : spine_args(t->fun)) fun2 = app(fun2, arg);
  TermPtr noun = noun_head(t->arg);
  bool plural = noun->is_const() && (noun->pos == "NNS" || noun->pos == "NNPS");
  TermPtr q = cnst(plural ? "s" : "een", "DT", ty_fun(ty_atom("n"), ty_atom("np")));
  return app(fun2, app(q, t->arg));
}

// (a) determiner raise: Mod (Det N) ==> Det (Mod' N) with Mod' : n -> n.
inline std::optional<TermPtr> match_determiner_raise(const TermPtr& t, TypeCtx& ctx,
                                                     const FixEnv& env) {
  (void)env;
  if (!t->is_app() || !t->arg->is_app()) return std::nullopt;
  TermPtr det = t->arg->fun;
  if (!det->is_const() || det->pos != "DT") return std::nullopt;
  if (!det->ty->is_fun() || !is_atom_named(det->ty->arg, "n") ||
      !is_atom_named(det->ty->res, "np"))
    return std::nullopt;
  TermPtr mod = t->fun;
  TermPtr mod_head = spine_head(mod);
  if (!mod_head->is_const() || !is_modifier_tag(mod_head->pos)) return std::nullopt;
  TyPtr tm = try_type_of(mod, ctx);
  if (!tm || !tm->is_fun() || !is_atom_named(tm->arg, "np") || !is_atom_named(tm->res, "np"))
    return std::nullopt;
  return app(det, app(retype_modifier_to_n(mod), t->arg->arg));
}

// (c) nominal-adjective repair: Det Adj with Adj : np -> s_adj becomes
// Det' Adj' with Adj' : n and Det' : n -> np.
inline std::optional<TermPtr> match_nominal_adjective(const TermPtr& t, TypeCtx& ctx,
                                                      const FixEnv& env) {
  (void)ctx;
  (void)env;
  if (!t->is_app()) return std::nullopt;
  TermPtr det = t->fun, adj = t->arg;
  if (!det->is_const() || det->pos != "DT" || !adj->is_const() || !tag_is(adj->pos, "JJ"))
    return std::nullopt;
  if (!adj->ty->is_fun() || !is_atom_named(adj->ty->arg, "np") ||
      !is_atom_named(adj->ty->res, "s"))
    return std::nullopt;
  if (!det->ty->is_fun()) return std::nullopt;
  TermPtr adj2 = cnst(adj->name, adj->pos, ty_atom("n"));
  TermPtr det2 = cnst(det->name, det->pos, ty_fun(ty_atom("n"), det->ty->res));
  return app(det2, adj2);
}

// (d) predicative-PP complementation: an adjunct PP over a copula clause is
// rewritten as a complement of zijn, with zijn : pp -> vp.
inline std::optional<TermPtr> match_predicative_pp(const TermPtr& t, TypeCtx& ctx,
                                                   const FixEnv& env) {
  if (!t->is_app() || !t->fun->is_app()) return std::nullopt;
  TermPtr prep = t->fun->fun, np = t->fun->arg, clause = t->arg;
  if (!prep->is_const() || prep->pos != "IN") return std::nullopt;
  const TyPtr& pt = prep->ty;
  if (!pt->is_fun() || !is_atom_named(pt->arg, "np") || !pt->res->is_fun() ||
      !is_atom_named(pt->res->arg, "s") || !is_atom_named(pt->res->res, "s"))
    return std::nullopt;
  TyPtr tnp = try_type_of(np, ctx);
  if (!tnp || !is_atom_named(tnp, "np")) return std::nullopt;
  if (!clause->is_app() || clause->fun->is_app()) return std::nullopt;
  TermPtr cop = clause->fun;
  if (!cop->is_const() || !cop->ty->is_fun() || !is_atom_named(cop->ty->arg, "np") ||
      !is_atom_named(cop->ty->res, "s"))
    return std::nullopt;
  if (cop->name != "zijn") {
    if (env.config.lexicon.copulas.count(cop->name))
      env.note("fix: skipping predicative-PP rewrite for non-zijn copula '" + cop->name + "'");
    return std::nullopt;
  }
  TermPtr prep2 = cnst(prep->name, prep->pos, ty_fun(ty_atom("np"), ty_atom("pp")));
  TermPtr cop2 = cnst(cop->name, cop->pos, ty_fun(ty_atom("pp"), cop->ty));
  return app(app(cop2, app(prep2, np)), clause->arg);
}

inline TermPtr lemmatize(const TermPtr& t, const std::map<std::string, std::string>& lemma_of) {
  switch (t->kind) {
    case Term::Kind::Var: return t;
    case Term::Kind::Const: {
      auto it = lemma_of.find(t->name);
      return it == lemma_of.end() ? t : cnst(it->second, t->pos, t->ty);
    }
    case Term::Kind::App: return app(lemmatize(t->fun, lemma_of), lemmatize(t->arg, lemma_of));
    case Term::Kind::Abs: return lam(t->name, t->ty, lemmatize(t->body, lemma_of));
  }
  return t;
}

}  // namespace detail

// Single determiner-raise step with selectable traversal side; used to check
// that applications at disjoint sites commute.
inline std::optional<TermPtr> apply_determiner_raise_once(const TermPtr& t, const Config& config,
                                                          bool right_first = false) {
  detail::FixEnv env{config, {}, nullptr, 0};
  TypeCtx ctx;
  return detail::rewrite_first(
      t, ctx, [&](const TermPtr& u, TypeCtx& c) { return detail::match_determiner_raise(u, c, env); },
      right_first);
}

inline TermPtr fix(const TermPtr& term, const std::map<std::string, std::string>& lemma_of = {},
                   const Config& config = Config{}, std::ostream* log = nullptr) {
  detail::FixEnv env{config, lemma_of, log, 0};
  TermPtr t = detail::lemmatize(term, lemma_of);
  using Matcher =
      std::function<std::optional<TermPtr>(const TermPtr&, TypeCtx&)>;
  // Distribution feeds bare-NP insertion, which feeds determiner raising.
  const std::vector<Matcher> rules = {
      [&](const TermPtr& u, TypeCtx& c) { return detail::match_distribute(u, c, env); },
      [&](const TermPtr& u, TypeCtx& c) { return detail::match_bare_np(u, c, env); },
      [&](const TermPtr& u, TypeCtx& c) { return detail::match_determiner_raise(u, c, env); },
      [&](const TermPtr& u, TypeCtx& c) { return detail::match_nominal_adjective(u, c, env); },
      [&](const TermPtr& u, TypeCtx& c) { return detail::match_predicative_pp(u, c, env); },
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& rule : rules) {
      TypeCtx ctx;
      if (auto r = detail::rewrite_first(t, ctx, rule)) {
        if (++env.applications > config.fix_budget)
          throw FixDivergence("budget of " + std::to_string(config.fix_budget) + " exceeded");
        t = *r;
        if (!well_typed(t)) throw ValidationError("fixing rule produced an ill-typed term");
        changed = true;
        break;
      }
    }
  }
  return t;
}

inline TermPtr fix(const TermPtr& term, const SyntacticDoc& doc, const Config& config = Config{},
                   std::ostream* log = nullptr) {
  std::map<std::string, std::string> lemma_of;
  for (const auto& [token, info] : doc.lemma_map) lemma_of[token] = info.lemma;
  return fix(term, lemma_of, config, log);
}

// ---------------------------------------------------------------------------
// Stage 3: NP type raising. Determiners are retyped n -> (vp -> s) and
// quantified NPs float to their scope position: subject outermost per clause,
// object quantifiers hosted at the verb's function node, quantifiers nested
// in a restrictor raised immediately above their host NP.
// ---------------------------------------------------------------------------

namespace detail {

struct RaiseState {
  const Config& config;
  int next_var = 0;
  TypeCtx ctx;

  std::string fresh() { return "v" + std::to_string(++next_var); }
};

struct Float {
  TermPtr det;
  TermPtr restrictor;
  std::string var_name;
};

inline bool is_quantified_np(const TermPtr& t, const Config& config) {
  if (!t->is_app()) return false;
  TermPtr det = t->fun;
  if (!det->is_const()) return false;
  if (det->pos != "DT" && !config.lexicon.determiner_lemmas.count(det->name)) return false;
  return det->ty->is_fun() && is_atom_named(det->ty->arg, "n") &&
         is_atom_named(det->ty->res, "np");
}

inline TyPtr raised_det_ty() {
  return ty_fun(ty_atom("n"),
                ty_fun(ty_fun(ty_atom("np"), ty_atom("s")), ty_atom("s")));
}

inline TermPtr wrap_floats(const std::vector<Float>& floats, TermPtr body) {
  for (const auto& f : floats) {  // later entries wrap outermost
    TermPtr det = cnst(f.det->name, f.det->pos, raised_det_ty());
    TermPtr vp = eta_contract_root(lam(f.var_name, ty_atom("np"), body));
    body = app(app(det, f.restrictor), vp);
  }
  return body;
}

inline std::pair<TermPtr, std::vector<Float>> raise_walk(const TermPtr& t, RaiseState& st);

// Processes one spine argument; quantified NPs are replaced by fresh
// variables and recorded as floats (own float first, restrictor floats
// outside it).
inline TermPtr raise_arg(const TermPtr& a, RaiseState& st, std::vector<Float>& floats,
                         bool allow_float) {
  if (allow_float && is_quantified_np(a, st.config)) {
    auto [restr, rfloats] = raise_walk(a->arg, st);
    std::string v = st.fresh();
    st.ctx.emplace_back(v, ty_atom("np"));
    floats.push_back(Float{a->fun, restr, v});
    for (auto& f : rfloats) floats.push_back(std::move(f));
    return var(v);
  }
  auto [a2, afloats] = raise_walk(a, st);
  for (auto& f : afloats) floats.push_back(std::move(f));
  return a2;
}

inline std::pair<TermPtr, std::vector<Float>> raise_walk(const TermPtr& t, RaiseState& st) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const: return {t, {}};
    case Term::Kind::Abs: {
      st.ctx.emplace_back(t->name, t->ty);
      auto [body, floats] = raise_walk(t->body, st);
      TyPtr tb = try_type_of(body, st.ctx);
      st.ctx.pop_back();
      if (!floats.empty()) {
        if (tb && is_atom_named(tb, "s")) {
          return {lam(t->name, t->ty, wrap_floats(floats, body)), {}};
        }
        for (const auto& f : floats)
          if (count_occurrences(f.restrictor, t->name) > 0)
            throw RaiseFailure("quantifier restrictor would capture bound variable " + t->name);
      }
      return {lam(t->name, t->ty, body), floats};
    }
    case Term::Kind::App: {
      TermPtr head = spine_head(t);
      std::vector<TermPtr> args = spine_args(t);
      std::vector<Float> floats;
      size_t own_start_count = 0;
      TermPtr head2 = head;
      if (!head->is_const() && !head->is_var()) {
        auto [h2, hfloats] = raise_walk(head, st);
        head2 = h2;
        for (auto& f : hfloats) floats.push_back(std::move(f));
      }
      bool coord_head = head->is_const() && st.config.lexicon.coordinators.count(head->name);
      own_start_count = floats.size();
      size_t own = 0;
      TermPtr out = head2;
      for (const auto& a : args) {
        size_t before = floats.size();
        TermPtr a2 = raise_arg(a, st, floats, !coord_head);
        if (floats.size() > before && a2->is_var()) ++own;
        out = app(out, a2);
      }
      (void)own_start_count;
      if (floats.empty()) return {out, {}};
      TyPtr ty = try_type_of(out, st.ctx);
      if (!ty) throw RaiseFailure("cannot type node while raising: " + display_term(out));
      if (is_atom_named(ty, "s")) return {wrap_floats(floats, out), {}};
      if (own > 0 && ty->is_fun() && is_atom_named(ty_result(ty), "s")) {
        // λ-extend the function node so the quantifiers scope over its body.
        std::vector<std::pair<std::string, TyPtr>> binders;
        TermPtr body = out;
        TyPtr cur = ty;
        while (cur->is_fun()) {
          std::string z = st.fresh();
          st.ctx.emplace_back(z, cur->arg);
          binders.emplace_back(z, cur->arg);
          body = app(body, var(z));
          cur = cur->res;
        }
        body = wrap_floats(floats, body);
        for (auto it = binders.rbegin(); it != binders.rend(); ++it)
          body = lam(it->first, it->second, body);
        return {body, {}};
      }
      return {out, floats};
    }
  }
  throw InternalError("unreachable term kind");
}

}  // namespace detail

inline TermPtr type_raise(const TermPtr& t, const Config& config = Config{}) {
  detail::RaiseState st{config};
  auto [out, floats] = detail::raise_walk(t, st);
  if (!floats.empty()) out = detail::wrap_floats(floats, out);
  TyPtr ty;
  try {
    ty = type_of(out);
  } catch (const Error& e) {
    throw RaiseFailure(e.what());
  }
  if (!detail::is_atom_named(ty, "s"))
    throw RaiseFailure("raised term has type " + print_ty(ty) + ", expected s");
  return out;
}

// Full conversion of a validated syntactic document to an LLF.
inline TermPtr convert_to_llf(const SyntacticDoc& doc,
                              const TypeSimplificationMap& map = default_simplification_map(),
                              const Config& config = Config{}, std::ostream* log = nullptr) {
  TermPtr sim = simplify(doc, map);
  TermPtr fixed = fix(sim, doc, config, log);
  return type_raise(fixed, config);
}

}  // namespace nltab
