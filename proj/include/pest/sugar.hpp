#pragma once

#include "pest/infer.hpp"
#include "pest/logic.hpp"

#include <set>
#include <string>
#include <vector>

namespace pest {

// A high-level iteration construct cannot be expanded: the body violates a
// well-formedness condition of the construct.
class ExpandError : public std::runtime_error {
public:
    ExpandError(Span sp, const std::string& msg)
        : std::runtime_error(sp.str() + ": " + msg), span(sp), message(msg) {}
    Span span;
    std::string message;
};

// ---------------------------------------------------------------------------
// for-expansion (§ Pascal-style loop with a guessed invariant)
// ---------------------------------------------------------------------------

// for i from l to h do s od  with loop postcondition Q_f becomes
//   local i <- l
//   while i < h  :?! l <= i && i <= h  :?! Q_f{h→i}  :# h - i  do s; i <- i+1 od
// The guessed invariant is not assumed: it is verified downstream like any
// declared annotation.
inline SentencePtr expand_for(const SFor& f, Span span, const Predicate& q_f, CalcCtx& ctx) {
    if (mod_vars(*f.body).count(f.index))
        throw ExpandError(span, "'for' body assigns the index '" + f.index + "'");
    ctx.env.vars[f.index] = Ty::Int;
    ctx.pool.used.insert(f.index);

    ExprPtr i = mk_var(f.index, span);
    ExprPtr bounds = mk_and(mk_le(f.lo, i), mk_le(i, f.hi));
    ExprPtr guessed = substitute(q_f, f.hi, i);
    SWhile w;
    w.guard = mk_lt(i, f.hi, span);
    w.invariants.push_back({bounds, Origin::Inferred});
    w.invariants.push_back({guessed, Origin::Inferred});
    w.variant = mk_sub(f.hi, i);
    w.body = mk_seq(f.body, mk_assign(f.index, mk_add(i, mk_int(1, span)), span), span);
    return mk_seq(mk_local(f.index, f.lo, span), mk_sentence(std::move(w), span), span);
}

// ---------------------------------------------------------------------------
// map-expansion (§ declarative iteration; invariants correct by construction)
// ---------------------------------------------------------------------------

namespace sugar_detail {

// Every occurrence of the mapped array must be A[i] or `update A on i with e`.
inline void check_array_occurrences(const Expr& e, const std::string& arr, const std::string& idx,
                                    Span stmt_span) {
    const auto* v = e.as<Var>();
    if (v && v->name == arr)
        throw ExpandError(e.span.valid() ? e.span : stmt_span,
                          "'" + arr + "' may only be accessed as '" + arr + "[" + idx + "]'");
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ArrayAccess>) {
                const auto* base = as_node<Var>(x.array);
                if (base && base->name == arr) {
                    const auto* iv = as_node<Var>(x.index);
                    if (!iv || iv->name != idx)
                        throw ExpandError(e.span, "'" + arr + "' is indexed by something other than '" +
                                                      idx + "'");
                    return;  // the base occurrence is the allowed form
                }
                check_array_occurrences(*x.array, arr, idx, stmt_span);
                check_array_occurrences(*x.index, arr, idx, stmt_span);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                const auto* base = as_node<Var>(x.array);
                if (base && base->name == arr) {
                    const auto* iv = as_node<Var>(x.index);
                    if (!iv || iv->name != idx)
                        throw ExpandError(e.span, "'" + arr + "' is updated at something other than '" +
                                                      idx + "'");
                    check_array_occurrences(*x.index, arr, idx, stmt_span);
                    check_array_occurrences(*x.value, arr, idx, stmt_span);
                    return;
                }
                check_array_occurrences(*x.array, arr, idx, stmt_span);
                check_array_occurrences(*x.index, arr, idx, stmt_span);
                check_array_occurrences(*x.value, arr, idx, stmt_span);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                check_array_occurrences(*x.array, arr, idx, stmt_span);
            } else if constexpr (std::is_same_v<T, Unary>) {
                check_array_occurrences(*x.arg, arr, idx, stmt_span);
            } else if constexpr (std::is_same_v<T, Binary>) {
                check_array_occurrences(*x.lhs, arr, idx, stmt_span);
                check_array_occurrences(*x.rhs, arr, idx, stmt_span);
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                check_array_occurrences(*x.lo, arr, idx, stmt_span);
                check_array_occurrences(*x.hi, arr, idx, stmt_span);
                check_array_occurrences(*x.body, arr, idx, stmt_span);
            } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                check_array_occurrences(*x.body, arr, idx, stmt_span);
            }
        },
        e.node);
}

inline void check_map_body(const Sentence& s, const std::string& arr, const std::string& idx) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SAssign>) {
                if (x.target == arr) {
                    const auto* upd = as_node<ArrayUpdate>(x.value);
                    const auto* base = upd ? as_node<Var>(upd->array) : nullptr;
                    if (!upd || !base || base->name != arr)
                        throw ExpandError(s.span, "'" + arr + "' may only be updated elementwise at '" +
                                                      idx + "'");
                }
                check_array_occurrences(*x.value, arr, idx, s.span);
            } else if constexpr (std::is_same_v<T, SLocal>) {
                check_array_occurrences(*x.init, arr, idx, s.span);
            } else if constexpr (std::is_same_v<T, SIf>) {
                check_array_occurrences(*x.guard, arr, idx, s.span);
                check_map_body(*x.then_branch, arr, idx);
                check_map_body(*x.else_branch, arr, idx);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                check_array_occurrences(*x.guard, arr, idx, s.span);
                for (const auto& c : x.invariants) check_array_occurrences(*c.pred, arr, idx, s.span);
                check_array_occurrences(*x.variant, arr, idx, s.span);
                check_map_body(*x.body, arr, idx);
            } else if constexpr (std::is_same_v<T, SCall>) {
                for (const auto& a : x.actuals)
                    if (a == arr)
                        throw ExpandError(s.span, "'" + arr + "' may not be passed whole to a call");
            } else if constexpr (std::is_same_v<T, SSeq>) {
                check_map_body(*x.first, arr, idx);
                check_map_body(*x.second, arr, idx);
            }
        },
        s.node);
}

}  // namespace sugar_detail

// map s in A[..i..] becomes
//   local i <- 0
//   while i < |A|
//     :?! 0 <= i && i <= |A|
//     :?! forall-k / 0 <= k < i : post_s{i→k}
//     :?! forall-k / i <= k < |A| : A[k] = A@pre[k]
//     :# |A| - i
//   do s; i <- i+1 od
// where post_s = post(s, 0 <= i && i < |A| && A[i] = A@pre[i]). The iteration
// entry carries A[i] = A@pre[i], which the suffix invariant supplies, so the
// prefix invariant relates the updated cells to the procedure-entry array.
// These invariants hold by construction; the loop is tagged so the verifier
// may skip their VCs.
inline SentencePtr expand_map(const SMap& m, Span span, CalcCtx& ctx) {
    std::set<std::string> mods = mod_vars(*m.body);
    for (const auto& l : local_vars(*m.body)) mods.erase(l);
    if (mods != std::set<std::string>{m.array}) {
        std::string extra;
        for (const auto& v : mods)
            if (v != m.array) extra += (extra.empty() ? "" : ", ") + v;
        if (!mods.count(m.array))
            throw ExpandError(span, "'map' body never updates '" + m.array + "'");
        throw ExpandError(span, "'map' body modifies more than '" + m.array + "': " + extra);
    }
    sugar_detail::check_map_body(*m.body, m.array, m.index);
    if (ctx.env.lookup(at_pre_key(m.array)) == std::nullopt)
        throw ExpandError(span, "'map' iterates over '" + m.array +
                                    "', which is not a parameter of the procedure");

    ctx.env.vars[m.index] = Ty::Int;
    ctx.pool.used.insert(m.index);

    ExprPtr i = mk_var(m.index, span);
    ExprPtr arr = mk_var(m.array, span);
    ExprPtr arr_pre = mk_at_pre(m.array, span);
    ExprPtr size = mk_size(arr, span);
    ExprPtr zero = mk_int(0, span);

    // post_s of one iteration, from the entry predicate it can rely on
    Predicate entry = mk_and(mk_and(mk_le(zero, i), mk_lt(i, size)),
                             mk_eq(mk_index(arr, i, span), mk_index(arr_pre, i, span)));
    CalcCtx quiet = ctx;
    quiet.mode = EmitMode::Ignore;
    Predicate post_s = post(m.body, entry, quiet);
    post_s = mk_unbounded_exists(local_vars(*m.body), post_s, span);

    std::string k = ctx.pool.fresh("k");
    ExprPtr kv = mk_var(k, span);
    Predicate prefix = mk_quant(QuantKind::Forall, k, zero, i,
                                substitute(post_s, i, kv), span);
    Predicate suffix = mk_quant(QuantKind::Forall, k, i, size,
                                mk_eq(mk_index(arr, kv, span), mk_index(arr_pre, kv, span)), span);

    SWhile w;
    w.guard = mk_lt(i, size, span);
    w.invariants.push_back({mk_and(mk_le(zero, i), mk_le(i, size)), Origin::Inferred});
    w.invariants.push_back({prefix, Origin::Inferred});
    w.invariants.push_back({suffix, Origin::Inferred});
    w.variant = mk_sub(size, i);
    w.body = mk_seq(m.body, mk_assign(m.index, mk_add(i, mk_int(1, span)), span), span);
    w.cbc = true;
    return mk_seq(mk_local(m.index, zero, span), mk_sentence(std::move(w), span), span);
}

// ---------------------------------------------------------------------------
// Whole-program desugaring
// ---------------------------------------------------------------------------

// Backward pass: starting from the procedure postcondition, compute the
// predicate each suffix requires with the precondition calculus; when a For
// is reached that predicate is its Q_f. Nested constructs take their target
// from the enclosing guessed invariant advanced past the index increment.
inline SentencePtr desugar_sentence(const SentencePtr& s, Predicate target, CalcCtx& ctx) {
    return std::visit(
        [&](const auto& x) -> SentencePtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SSeq>) {
                SentencePtr second = desugar_sentence(x.second, target, ctx);
                CalcCtx quiet = ctx;
                quiet.mode = EmitMode::Ignore;
                Predicate mid = pre(second, target, quiet);
                SentencePtr first = desugar_sentence(x.first, mid, ctx);
                return mk_seq(first, second, s->span);
            } else if constexpr (std::is_same_v<T, SIf>) {
                SentencePtr then_b = desugar_sentence(x.then_branch, target, ctx);
                SentencePtr else_b = desugar_sentence(x.else_branch, target, ctx);
                return mk_sentence(SIf{x.guard, then_b, else_b}, s->span);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                std::vector<ExprPtr> inv_preds;
                for (const auto& c : x.invariants) inv_preds.push_back(c.pred);
                SWhile w = x;
                w.body = desugar_sentence(x.body, mk_conj(inv_preds), ctx);
                return mk_sentence(std::move(w), s->span);
            } else if constexpr (std::is_same_v<T, SFor>) {
                ctx.env.vars[x.index] = Ty::Int;
                ExprPtr i = mk_var(x.index, s->span);
                ExprPtr bounds = mk_and(mk_le(x.lo, i), mk_le(i, x.hi));
                ExprPtr guessed = substitute(target, x.hi, i);
                ExprPtr next = mk_add(i, mk_int(1, s->span));
                Predicate inner_target =
                    substitute(mk_and(bounds, guessed), i, next);
                SFor f = x;
                f.body = desugar_sentence(x.body, inner_target, ctx);
                return expand_for(f, s->span, target, ctx);
            } else if constexpr (std::is_same_v<T, SMap>) {
                SMap m = x;
                m.body = desugar_sentence(x.body, mk_true(s->span), ctx);
                return expand_map(m, s->span, ctx);
            } else {
                return s;
            }
        },
        s->node);
}

// Expand every for/map in the program. The result contains no high-level
// iteration constructs; guessed invariants are verified downstream and map
// invariants are tagged correct by construction.
inline Program desugar_program(const Program& prog, const TypeEnvs& envs) {
    Program out;
    for (const auto& proc : prog.procedures) {
        CalcCtx ctx = CalcCtx::for_procedure(out, proc, envs.at(proc.name), EmitMode::Ignore);
        Procedure d = proc;
        d.body = desugar_sentence(proc.body, proc.post_conj(), ctx);
        out.procedures.push_back(std::move(d));
    }
    return out;
}

}  // namespace pest
