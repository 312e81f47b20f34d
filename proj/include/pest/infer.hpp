#pragma once

#include "pest/ast.hpp"
#include "pest/logic.hpp"
#include "pest/solver.hpp"
#include "pest/types.hpp"
#include "pest/vc.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pest {

// A side condition of the postcondition/precondition calculus failed (or
// could not be decided) while a predicate was being computed.
class SideConditionFailure : public std::runtime_error {
public:
    SideConditionFailure(VC vc_, Verdict verdict_)
        : std::runtime_error(vc_.id + " (" + vc_.rule + ") at " + vc_.span.str() + ": " +
                             verdict_name(verdict_.kind) +
                             (verdict_.reason.empty() ? "" : ": " + verdict_.reason)),
          vc(std::move(vc_)),
          verdict(std::move(verdict_)) {}

    VC vc;
    Verdict verdict;
};

// How emitted side conditions are handled:
//   Collect — record for later dispatch (the verifier),
//   Check   — decide immediately, throw SideConditionFailure on non-pass,
//   Ignore  — predicate transformation only (strengthening, desugaring).
enum class EmitMode { Collect, Check, Ignore };

struct CalcCtx {
    const Program* prog = nullptr;
    std::string proc;
    TypeEnv env;  // grows as fresh variables are introduced
    FreshPool pool;
    EmitMode mode = EmitMode::Ignore;
    const SolverConfig* cfg = nullptr;  // Check mode
    std::vector<VC>* out = nullptr;     // Collect mode
    bool cbc_skip = true;               // honor correct-by-construction tags
    int counter = 0;

    static CalcCtx for_procedure(const Program& prog, const Procedure& p, const TypeEnv& env,
                                 EmitMode mode) {
        CalcCtx ctx;
        ctx.prog = &prog;
        ctx.proc = p.name;
        ctx.env = env;
        ctx.mode = mode;
        ctx.pool.reserve(all_names(p));
        for (const auto& [name, ty] : env.vars) ctx.pool.used.insert(name);
        return ctx;
    }

    std::string fresh(const std::string& base, Ty ty) {
        std::string name = pool.fresh(base);
        env.vars[name] = ty;
        return name;
    }

    Ty type_of(const std::string& name) const {
        auto t = env.lookup(name);
        if (!t) throw std::logic_error("no type recorded for '" + name + "'");
        return *t;
    }

    void emit(const std::string& rule, Predicate hyp, Predicate goal, Span span,
              bool cbc = false) {
        if (mode == EmitMode::Ignore) return;
        VC vc;
        vc.id = make_id(rule);
        vc.procedure = proc;
        vc.rule = rule;
        vc.hypothesis = std::move(hyp);
        vc.goal = std::move(goal);
        vc.span = span;
        vc.env = env;
        vc.cbc = cbc;
        if (mode == EmitMode::Collect) {
            out->push_back(std::move(vc));
            return;
        }
        if (cbc && cbc_skip) return;
        Verdict v = check_entailment(vc, *cfg);
        if (!v.passed()) throw SideConditionFailure(std::move(vc), std::move(v));
    }

private:
    std::string make_id(const std::string& rule) {
        std::string n = std::to_string(counter++);
        if (n.size() < 2) n = "0" + n;
        return proc + "/" + n + "/" + rule;
    }
};

// ---------------------------------------------------------------------------
// Postcondition calculus (strongest-postcondition traversal)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Subst> var_subst(const std::vector<std::string>& from,
                                    const std::vector<std::string>& to) {
    std::vector<Subst> subs;
    for (size_t i = 0; i < from.size(); ++i)
        if (from[i] != to[i]) subs.push_back({mk_var(from[i]), mk_var(to[i])});
    return subs;
}

}  // namespace detail

inline Predicate post(const SentencePtr& s, Predicate p, CalcCtx& ctx);

namespace detail {

// Q-ASSIGN: ∃v'( p[v→v'] ∧ v = e[v→v'] ), guarded by p ⊢ safe(e). Local
// definitions use the same shape; the binder vanishes when v' is unused.
inline Predicate post_binding(const std::string& target, const ExprPtr& value, Predicate p,
                              Span span, const char* rule, CalcCtx& ctx) {
    ctx.emit(rule, p, safe_expr(value), value->span);
    std::string primed = ctx.fresh(target + "'", ctx.type_of(target));
    ExprPtr v = mk_var(target, span);
    ExprPtr vp = mk_var(primed, span);
    ExprPtr p_sub = substitute(p, v, vp);
    ExprPtr e_sub = substitute(value, v, vp);
    return mk_unbounded_exists({primed}, mk_and(p_sub, mk_eq(v, e_sub)), span);
}

// S-WHILE premises around a body traversal; returns the loop exit predicate
// inv ∧ ¬g with the body's locals closed out. `established` controls the
// p ⊢ inv premise (the backward calculus returns inv to its caller instead).
inline Predicate post_while(const SWhile& w, Span span, Predicate p, bool established,
                            CalcCtx& ctx) {
    std::vector<ExprPtr> inv_preds;
    for (const auto& c : w.invariants) inv_preds.push_back(c.pred);
    Predicate inv = mk_conj(inv_preds);

    if (established) ctx.emit("S-WHILE/inv-established", p, inv, span, w.cbc);
    ctx.emit("S-WHILE/safe-guard", inv, safe_expr(w.guard), w.guard->span);
    ctx.emit("S-WHILE/safe-variant", inv, safe_expr(w.variant), w.variant->span);
    ctx.emit("S-WHILE/variant-positive", mk_and(inv, w.guard),
             mk_binary(BinaryOp::Gt, w.variant, mk_int(0, w.variant->span), w.variant->span),
             w.variant->span);

    std::string var0 = ctx.fresh("var0", Ty::Int);
    Predicate entry = mk_and(mk_and(inv, w.guard), mk_eq(mk_var(var0, span), w.variant));
    Predicate after = post(w.body, entry, ctx);
    ctx.emit("S-WHILE/inv-preserved", after, inv, span, w.cbc);
    ctx.emit("S-WHILE/variant-decreases", after,
             mk_lt(w.variant, mk_var(var0, w.variant->span)), w.variant->span);

    Predicate exit = mk_and(inv, mk_not(w.guard, w.guard->span));
    return mk_unbounded_exists(local_vars(*w.body), exit, span);
}

// Contract-style call rule: prove the callee's precondition on the actuals,
// then advance the predicate by the callee's postcondition with each
// actual's pre-state value frozen behind a fresh existential.
inline Predicate post_call(const SCall& c, Span span, Predicate p, CalcCtx& ctx) {
    const Procedure* callee = ctx.prog->find(c.proc);
    if (!callee) throw std::logic_error("call to unknown procedure '" + c.proc + "'");

    std::vector<Subst> entry_subs;  // callee pre: formals (and formal@pre) -> actuals
    for (size_t i = 0; i < c.actuals.size(); ++i) {
        entry_subs.push_back({mk_var(callee->params[i]), mk_var(c.actuals[i], span)});
        entry_subs.push_back({mk_at_pre(callee->params[i]), mk_var(c.actuals[i], span)});
    }
    ctx.emit("S-CALL/precondition", p, substitute_parallel(callee->pre_conj(), entry_subs), span);

    std::vector<std::string> saved;
    std::vector<Subst> p_subs, post_subs;
    for (size_t i = 0; i < c.actuals.size(); ++i) {
        std::string s = ctx.fresh(c.actuals[i] + "'", ctx.type_of(c.actuals[i]));
        saved.push_back(s);
        p_subs.push_back({mk_var(c.actuals[i]), mk_var(s, span)});
        post_subs.push_back({mk_at_pre(callee->params[i]), mk_var(s, span)});
        post_subs.push_back({mk_var(callee->params[i]), mk_var(c.actuals[i], span)});
    }
    Predicate frame = substitute_parallel(p, p_subs);
    Predicate effect = substitute_parallel(callee->post_conj(), post_subs);
    return mk_unbounded_exists(std::set<std::string>(saved.begin(), saved.end()),
                               mk_and(frame, effect), span);
}

}  // namespace detail

// Strongest postcondition of a For/Map-free sentence from predicate p,
// emitting the side-condition VCs of the static semantics along the way.
inline Predicate post(const SentencePtr& s, Predicate p, CalcCtx& ctx) {
    return std::visit(
        [&](const auto& x) -> Predicate {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SSkip>) {
                return p;
            } else if constexpr (std::is_same_v<T, SAssign>) {
                return detail::post_binding(x.target, x.value, p, s->span, "S-ASSIGN/safe", ctx);
            } else if constexpr (std::is_same_v<T, SLocal>) {
                return detail::post_binding(x.name, x.init, p, s->span, "S-LOCAL/safe", ctx);
            } else if constexpr (std::is_same_v<T, SSeq>) {
                return post(x.second, post(x.first, p, ctx), ctx);
            } else if constexpr (std::is_same_v<T, SIf>) {
                ctx.emit("S-IF/safe-guard", p, safe_expr(x.guard), x.guard->span);
                Predicate q1 = post(x.then_branch, mk_and(p, x.guard), ctx);
                Predicate q2 = post(x.else_branch, mk_and(p, mk_not(x.guard, x.guard->span)), ctx);
                Predicate c1 = mk_unbounded_exists(local_vars(*x.then_branch), q1, s->span);
                Predicate c2 = mk_unbounded_exists(local_vars(*x.else_branch), q2, s->span);
                return mk_or(c1, c2);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                return detail::post_while(x, s->span, p, /*established=*/true, ctx);
            } else if constexpr (std::is_same_v<T, SCall>) {
                return detail::post_call(x, s->span, p, ctx);
            } else {
                throw std::logic_error(s->span.str() +
                                       ": 'for'/'map' must be expanded before analysis");
            }
        },
        s->node);
}

// ---------------------------------------------------------------------------
// Precondition calculus
// ---------------------------------------------------------------------------
//
// Weakest preconditions, except that a while returns its invariant (checking
// the loop's own premises and inv ∧ ¬g ⊢ q), and a call uses the standard
// contract rule, whose result quantifies over the copy-out values.

inline Predicate pre(const SentencePtr& s, Predicate q, CalcCtx& ctx) {
    return std::visit(
        [&](const auto& x) -> Predicate {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SSkip>) {
                return q;
            } else if constexpr (std::is_same_v<T, SAssign>) {
                return mk_and(safe_expr(x.value), substitute(q, mk_var(x.target), x.value));
            } else if constexpr (std::is_same_v<T, SLocal>) {
                return mk_and(safe_expr(x.init), substitute(q, mk_var(x.name), x.init));
            } else if constexpr (std::is_same_v<T, SSeq>) {
                return pre(x.first, pre(x.second, q, ctx), ctx);
            } else if constexpr (std::is_same_v<T, SIf>) {
                Predicate then_pre = pre(x.then_branch, q, ctx);
                Predicate else_pre = pre(x.else_branch, q, ctx);
                ExprPtr not_g = mk_not(x.guard, x.guard->span);
                return mk_and(safe_expr(x.guard),
                              mk_and(mk_imp(x.guard, then_pre), mk_imp(not_g, else_pre)));
            } else if constexpr (std::is_same_v<T, SWhile>) {
                std::vector<ExprPtr> inv_preds;
                for (const auto& c : x.invariants) inv_preds.push_back(c.pred);
                Predicate inv = mk_conj(inv_preds);
                Predicate exit = mk_and(inv, mk_not(x.guard, x.guard->span));
                ctx.emit("PRE-WHILE/exit-establishes", exit, q, s->span);
                detail::post_while(x, s->span, inv, /*established=*/false, ctx);
                return inv;
            } else if constexpr (std::is_same_v<T, SCall>) {
                const Procedure* callee = ctx.prog->find(x.proc);
                if (!callee) throw std::logic_error("call to unknown procedure '" + x.proc + "'");
                std::vector<Subst> entry_subs, post_subs, q_subs;
                std::vector<std::string> results;
                for (size_t i = 0; i < x.actuals.size(); ++i) {
                    entry_subs.push_back({mk_var(callee->params[i]), mk_var(x.actuals[i])});
                    entry_subs.push_back({mk_at_pre(callee->params[i]), mk_var(x.actuals[i])});
                    std::string r = ctx.fresh(x.actuals[i] + "'", ctx.type_of(x.actuals[i]));
                    results.push_back(r);
                    post_subs.push_back({mk_at_pre(callee->params[i]), mk_var(x.actuals[i])});
                    post_subs.push_back({mk_var(callee->params[i]), mk_var(r)});
                    q_subs.push_back({mk_var(x.actuals[i]), mk_var(r)});
                }
                Predicate pre_inst = substitute_parallel(callee->pre_conj(), entry_subs);
                Predicate post_inst = substitute_parallel(callee->post_conj(), post_subs);
                Predicate q_inst = substitute_parallel(q, q_subs);
                // ∀r( Post ⇒ q[actuals→r] ), written as ¬∃r¬(...)
                Predicate univ = mk_not(
                    mk_unbounded_exists(std::set<std::string>(results.begin(), results.end()),
                                        mk_not(mk_imp(post_inst, q_inst), s->span), s->span),
                    s->span);
                return mk_and(pre_inst, univ);
            } else {
                throw std::logic_error(s->span.str() +
                                       ": 'for'/'map' must be expanded before analysis");
            }
        },
        s->node);
}

// ---------------------------------------------------------------------------
// Whole-procedure contract inference (§-style P/Q construction)
// ---------------------------------------------------------------------------

// P0 = pre ∧ ⋀(param = param@pre): the symbolic freeze of every parameter.
inline Predicate frozen_precondition(const Procedure& p) {
    Predicate acc = p.pre_conj();
    for (const auto& prm : p.params)
        acc = mk_and(acc, mk_eq(mk_var(prm, p.span), mk_at_pre(prm, p.span)));
    return acc;
}

struct InferredContract {
    Predicate pre;   // P
    Predicate post;  // Q, mentions only params and param@pre
};

// P = pre(body, true); Q = post(body, P ∧ ⋀ p = p@pre) with the body's
// top-level locals existentially closed out.
inline InferredContract infer_contract(const Program& prog, const Procedure& proc,
                                       const TypeEnv& env, const SolverConfig& cfg,
                                       EmitMode mode = EmitMode::Check) {
    CalcCtx ctx = CalcCtx::for_procedure(prog, proc, env, mode);
    ctx.cfg = &cfg;
    Predicate P = pre(proc.body, mk_true(proc.span), ctx);

    Predicate start = P;
    for (const auto& prm : proc.params)
        start = mk_and(start, mk_eq(mk_var(prm, proc.span), mk_at_pre(prm, proc.span)));
    Predicate Q = post(proc.body, start, ctx);
    Q = mk_unbounded_exists(local_vars(*proc.body), Q, proc.span);
    return {P, Q};
}

}  // namespace pest
