#pragma once

#include "pest/ast.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pest {

// A Predicate is a Bool-typed Expr, possibly containing UnboundedExists.
using Predicate = ExprPtr;

// ---------------------------------------------------------------------------
// Fresh names
// ---------------------------------------------------------------------------

// First of `base`, `base_0`, `base_1`, ... not in `avoid`.
inline std::string fresh_var(const std::string& base, const std::set<std::string>& avoid) {
    if (!avoid.count(base)) return base;
    for (int i = 0;; ++i) {
        std::string cand = base + "_" + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

// Name pool threaded through a traversal so generated names never collide.
struct FreshPool {
    std::set<std::string> used;

    std::string fresh(const std::string& base) {
        std::string name = fresh_var(base, used);
        used.insert(name);
        return name;
    }
    void reserve(const std::set<std::string>& names) { used.insert(names.begin(), names.end()); }
};

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

struct Subst {
    ExprPtr from;
    ExprPtr to;
};

namespace detail {

inline ExprPtr substitute_all(const ExprPtr& e, const std::vector<Subst>& subs);

// Binder-aware recursion step: `keep` is the subset of substitutions whose
// `from` does not mention any of the binder's variables (occurrences under
// the binder denote the bound variable, not the outer one).
inline ExprPtr subst_under_binder(const std::vector<std::string>& binders, const ExprPtr& body,
                                  const std::vector<Subst>& subs,
                                  std::vector<std::string>& out_binders) {
    std::vector<Subst> keep;
    for (const auto& s : subs) {
        auto fv = free_vars(s.from);
        bool shadowed = false;
        for (const auto& b : binders)
            if (fv.count(b)) { shadowed = true; break; }
        if (!shadowed) keep.push_back(s);
    }
    out_binders = binders;
    if (keep.empty()) return body;

    // Rename binders captured by a replacement's free variables.
    std::set<std::string> incoming;
    for (const auto& s : keep) {
        auto fv = free_vars(s.to);
        incoming.insert(fv.begin(), fv.end());
    }
    ExprPtr b = body;
    for (auto& name : out_binders) {
        if (!incoming.count(name)) continue;
        std::set<std::string> avoid = incoming;
        auto bfv = free_vars(b);
        avoid.insert(bfv.begin(), bfv.end());
        for (const auto& other : out_binders) avoid.insert(other);
        std::string renamed = fresh_var(name, avoid);
        b = substitute_all(b, {{mk_var(name), mk_var(renamed)}});
        name = renamed;
    }
    return substitute_all(b, keep);
}

inline ExprPtr substitute_all(const ExprPtr& e, const std::vector<Subst>& subs) {
    if (subs.empty()) return e;
    for (const auto& s : subs)
        if (struct_eq(*e, *s.from)) return s.to;

    return std::visit(
        [&](const auto& x) -> ExprPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, BoolLit> ||
                          std::is_same_v<T, Var> || std::is_same_v<T, VarAtPre>) {
                return e;
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                return mk_index(substitute_all(x.array, subs), substitute_all(x.index, subs),
                                e->span);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                return mk_size(substitute_all(x.array, subs), e->span);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                return mk_update(substitute_all(x.array, subs), substitute_all(x.index, subs),
                                 substitute_all(x.value, subs), e->span);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return mk_unary(x.op, substitute_all(x.arg, subs), e->span);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return mk_binary(x.op, substitute_all(x.lhs, subs), substitute_all(x.rhs, subs),
                                 e->span);
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                ExprPtr lo = substitute_all(x.lo, subs);
                ExprPtr hi = substitute_all(x.hi, subs);
                std::vector<std::string> binders;
                ExprPtr body = subst_under_binder({x.var}, x.body, subs, binders);
                return mk_quant(x.kind, binders[0], lo, hi, body, e->span);
            } else {
                const auto& u = static_cast<const UnboundedExists&>(x);
                std::vector<std::string> binders;
                ExprPtr body = subst_under_binder(u.vars, u.body, subs, binders);
                return mk_expr(UnboundedExists{binders, body}, e->span);
            }
        },
        e->node);
}

}  // namespace detail

// Replace every occurrence of `from` by `to`, capture-avoidingly. `from` and
// `to` must have the same type.
inline ExprPtr substitute(const ExprPtr& e, const ExprPtr& from, const ExprPtr& to) {
    return detail::substitute_all(e, {{from, to}});
}

// Simultaneous substitution; needed wherever caller and callee vocabularies
// may overlap (contract instantiation at call sites).
inline ExprPtr substitute_parallel(const ExprPtr& e, const std::vector<Subst>& subs) {
    return detail::substitute_all(e, subs);
}

// ---------------------------------------------------------------------------
// Structural simplifier: true/false absorption, double negation, x = x.
// Every rule preserves evaluation exactly, including undefinedness under
// left-to-right short-circuiting.
// ---------------------------------------------------------------------------

inline ExprPtr simplify(const ExprPtr& e) {
    return std::visit(
        [&](const auto& x) -> ExprPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Unary>) {
                ExprPtr arg = simplify(x.arg);
                if (x.op == UnaryOp::Not) {
                    if (is_true_lit(*arg)) return mk_bool(false, e->span);
                    if (is_false_lit(*arg)) return mk_bool(true, e->span);
                    if (const auto* inner = arg->as<Unary>(); inner && inner->op == UnaryOp::Not)
                        return inner->arg;
                }
                return mk_unary(x.op, arg, e->span);
            } else if constexpr (std::is_same_v<T, Binary>) {
                ExprPtr l = simplify(x.lhs);
                ExprPtr r = simplify(x.rhs);
                switch (x.op) {
                    case BinaryOp::And:
                        if (is_true_lit(*l)) return r;
                        if (is_false_lit(*l)) return mk_bool(false, e->span);
                        if (is_true_lit(*r)) return l;
                        break;
                    case BinaryOp::Or:
                        if (is_true_lit(*l)) return mk_bool(true, e->span);
                        if (is_false_lit(*l)) return r;
                        if (is_false_lit(*r)) return l;
                        break;
                    case BinaryOp::Imp:
                        if (is_true_lit(*l)) return r;
                        if (is_false_lit(*l)) return mk_bool(true, e->span);
                        break;
                    case BinaryOp::Eq: {
                        const auto *lv = l->as<Var>(), *rv = r->as<Var>();
                        if (lv && rv && lv->name == rv->name) return mk_bool(true, e->span);
                        const auto *lp = l->as<VarAtPre>(), *rp = r->as<VarAtPre>();
                        if (lp && rp && lp->name == rp->name) return mk_bool(true, e->span);
                        break;
                    }
                    default: break;
                }
                return mk_binary(x.op, l, r, e->span);
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                return mk_quant(x.kind, x.var, simplify(x.lo), simplify(x.hi), simplify(x.body),
                                e->span);
            } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                ExprPtr body = simplify(x.body);
                if (is_true_lit(*body) || is_false_lit(*body)) return body;
                auto fv = free_vars(body);
                std::vector<std::string> vars;
                for (const auto& v : x.vars)
                    if (fv.count(v)) vars.push_back(v);
                if (vars.empty()) return body;
                return mk_expr(UnboundedExists{std::move(vars), body}, e->span);
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                return mk_index(simplify(x.array), simplify(x.index), e->span);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                return mk_size(simplify(x.array), e->span);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                return mk_update(simplify(x.array), simplify(x.index), simplify(x.value), e->span);
            } else {
                return e;
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Existential closure
// ---------------------------------------------------------------------------

// UnboundedExists over `vars` restricted to the free variables of `body`;
// returns `body` unchanged when no variable actually occurs.
inline Predicate mk_unbounded_exists(const std::set<std::string>& vars, const Predicate& body,
                                     Span sp = {}) {
    auto fv = free_vars(body);
    std::vector<std::string> used;
    for (const auto& v : vars)
        if (fv.count(v)) used.push_back(v);
    if (used.empty()) return body;
    return mk_expr(UnboundedExists{std::move(used), body}, sp.valid() ? sp : body->span);
}

inline Predicate existential_closure(const Predicate& p, const std::set<std::string>& vars) {
    return mk_unbounded_exists(vars, p);
}

// ---------------------------------------------------------------------------
// Safe-evaluation conditions
// ---------------------------------------------------------------------------

namespace detail {

inline ExprPtr safe_raw(const ExprPtr& e) {
    Span sp = e->span;
    return std::visit(
        [&](const auto& x) -> ExprPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, BoolLit> ||
                          std::is_same_v<T, Var> || std::is_same_v<T, VarAtPre>) {
                return mk_true(sp);
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                ExprPtr guard = mk_and(mk_le(mk_int(0, sp), x.index),
                                       mk_lt(x.index, mk_size(x.array, sp)));
                return mk_and(mk_and(safe_raw(x.array), safe_raw(x.index)), guard);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                return safe_raw(x.array);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                ExprPtr guard = mk_and(mk_le(mk_int(0, sp), x.index),
                                       mk_lt(x.index, mk_size(x.array, sp)));
                return mk_and(mk_and(mk_and(safe_raw(x.array), safe_raw(x.index)),
                                     safe_raw(x.value)),
                              guard);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return safe_raw(x.arg);
            } else if constexpr (std::is_same_v<T, Binary>) {
                ExprPtr both = mk_and(safe_raw(x.lhs), safe_raw(x.rhs));
                if (x.op == BinaryOp::Div || x.op == BinaryOp::Mod)
                    return mk_and(both, mk_binary(BinaryOp::Ne, x.rhs, mk_int(0, sp), sp));
                return both;
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                // The body guard only has to hold inside the quantified range.
                ExprPtr body_safe = mk_quant(QuantKind::Forall, x.var, x.lo, x.hi,
                                             safe_raw(x.body), sp);
                return mk_and(mk_and(safe_raw(x.lo), safe_raw(x.hi)), body_safe);
            } else {
                const auto& u = static_cast<const UnboundedExists&>(x);
                // forall vs (safe body), written with the one unbounded
                // quantifier the predicate language has.
                return mk_not(mk_expr(UnboundedExists{u.vars, mk_not(safe_raw(u.body), sp)}, sp),
                              sp);
            }
        },
        e->node);
}

}  // namespace detail

// Weakest syntactic guard making evaluation of `e` defined: indexes in
// range, divisors nonzero, propagated through quantifier ranges. Trivial
// conjuncts are dropped by the structural simplifier.
inline Predicate safe_expr(const ExprPtr& e) { return simplify(detail::safe_raw(e)); }

// ---------------------------------------------------------------------------
// Variable sets
// ---------------------------------------------------------------------------

// Syntactic overapproximation of the variables a sentence may write. All
// call actuals count (parameters are copied in and out); For adds its index,
// Map its array and index.
inline void mod_vars_into(const Sentence& s, std::set<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SAssign>) {
                out.insert(x.target);
            } else if constexpr (std::is_same_v<T, SLocal>) {
                out.insert(x.name);
            } else if constexpr (std::is_same_v<T, SIf>) {
                mod_vars_into(*x.then_branch, out);
                mod_vars_into(*x.else_branch, out);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                mod_vars_into(*x.body, out);
            } else if constexpr (std::is_same_v<T, SCall>) {
                out.insert(x.actuals.begin(), x.actuals.end());
            } else if constexpr (std::is_same_v<T, SFor>) {
                out.insert(x.index);
                mod_vars_into(*x.body, out);
            } else if constexpr (std::is_same_v<T, SMap>) {
                out.insert(x.array);
                out.insert(x.index);
                mod_vars_into(*x.body, out);
            } else if constexpr (std::is_same_v<T, SSeq>) {
                mod_vars_into(*x.first, out);
                mod_vars_into(*x.second, out);
            }
        },
        s.node);
}

inline std::set<std::string> mod_vars(const Sentence& s) {
    std::set<std::string> out;
    mod_vars_into(s, out);
    return out;
}

// Names introduced by `local` on the top scope chain of `s`. Locals of
// nested loop bodies and if-branches belong to those scopes.
inline void local_vars_into(const Sentence& s, std::set<std::string>& out) {
    if (const auto* l = s.as<SLocal>()) {
        out.insert(l->name);
    } else if (const auto* q = s.as<SSeq>()) {
        local_vars_into(*q->first, out);
        local_vars_into(*q->second, out);
    }
}

inline std::set<std::string> local_vars(const Sentence& s) {
    std::set<std::string> out;
    local_vars_into(s, out);
    return out;
}

// All identifiers occurring anywhere in a procedure, used to seed fresh-name
// pools.
inline std::set<std::string> all_names(const Expr& e) {
    std::set<std::string> out;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Var> || std::is_same_v<T, VarAtPre>) {
                out.insert(x.name);
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                auto a = all_names(*x.array), b = all_names(*x.index);
                out.insert(a.begin(), a.end());
                out.insert(b.begin(), b.end());
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                out = all_names(*x.array);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                for (const auto* sub : {x.array.get(), x.index.get(), x.value.get()}) {
                    auto a = all_names(*sub);
                    out.insert(a.begin(), a.end());
                }
            } else if constexpr (std::is_same_v<T, Unary>) {
                out = all_names(*x.arg);
            } else if constexpr (std::is_same_v<T, Binary>) {
                auto a = all_names(*x.lhs), b = all_names(*x.rhs);
                out.insert(a.begin(), a.end());
                out.insert(b.begin(), b.end());
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                out.insert(x.var);
                for (const auto* sub : {x.lo.get(), x.hi.get(), x.body.get()}) {
                    auto a = all_names(*sub);
                    out.insert(a.begin(), a.end());
                }
            } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                out.insert(x.vars.begin(), x.vars.end());
                auto a = all_names(*x.body);
                out.insert(a.begin(), a.end());
            }
        },
        e.node);
    return out;
}

inline void all_names_into(const Sentence& s, std::set<std::string>& out) {
    auto add_expr = [&](const ExprPtr& e) {
        auto a = all_names(*e);
        out.insert(a.begin(), a.end());
    };
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SAssign>) {
                out.insert(x.target);
                add_expr(x.value);
            } else if constexpr (std::is_same_v<T, SLocal>) {
                out.insert(x.name);
                add_expr(x.init);
            } else if constexpr (std::is_same_v<T, SIf>) {
                add_expr(x.guard);
                all_names_into(*x.then_branch, out);
                all_names_into(*x.else_branch, out);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                add_expr(x.guard);
                for (const auto& c : x.invariants) add_expr(c.pred);
                add_expr(x.variant);
                all_names_into(*x.body, out);
            } else if constexpr (std::is_same_v<T, SCall>) {
                out.insert(x.actuals.begin(), x.actuals.end());
            } else if constexpr (std::is_same_v<T, SFor>) {
                out.insert(x.index);
                add_expr(x.lo);
                add_expr(x.hi);
                all_names_into(*x.body, out);
            } else if constexpr (std::is_same_v<T, SMap>) {
                out.insert(x.array);
                out.insert(x.index);
                all_names_into(*x.body, out);
            } else if constexpr (std::is_same_v<T, SSeq>) {
                all_names_into(*x.first, out);
                all_names_into(*x.second, out);
            }
        },
        s.node);
}

inline std::set<std::string> all_names(const Procedure& p) {
    std::set<std::string> out(p.params.begin(), p.params.end());
    for (const auto& c : p.pre) {
        auto a = all_names(*c.pred);
        out.insert(a.begin(), a.end());
    }
    for (const auto& c : p.post) {
        auto a = all_names(*c.pred);
        out.insert(a.begin(), a.end());
    }
    all_names_into(*p.body, out);
    return out;
}

}  // namespace pest
