#pragma once

#include "pest/infer.hpp"
#include "pest/logic.hpp"

#include <string>
#include <vector>

namespace pest {

// Annotation strengthening: propagate facts about unmodified variables into
// loop invariants and the final postcondition. The transform threads the
// postcondition calculus through the sentence without checking side
// conditions; an unprovable loop surfaces later, in the verify phase.

inline SentencePtr strengthen_sentence(const SentencePtr& s, Predicate p, CalcCtx& ctx) {
    return std::visit(
        [&](const auto& x) -> SentencePtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SSeq>) {
                SentencePtr first = strengthen_sentence(x.first, p, ctx);
                Predicate after = post(first, p, ctx);
                SentencePtr second = strengthen_sentence(x.second, after, ctx);
                return mk_seq(first, second, s->span);
            } else if constexpr (std::is_same_v<T, SIf>) {
                SentencePtr then_b = strengthen_sentence(x.then_branch, mk_and(p, x.guard), ctx);
                SentencePtr else_b = strengthen_sentence(
                    x.else_branch, mk_and(p, mk_not(x.guard, x.guard->span)), ctx);
                return mk_sentence(SIf{x.guard, then_b, else_b}, s->span);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                // I = inv ∧ ∃modVars(body)(p)
                SWhile w = x;
                Predicate closed = existential_closure(p, mod_vars(*x.body));
                w.invariants.push_back({closed, Origin::Inferred});
                std::vector<ExprPtr> inv_preds;
                for (const auto& c : w.invariants) inv_preds.push_back(c.pred);
                Predicate entry = mk_and(mk_conj(inv_preds), w.guard);
                w.body = strengthen_sentence(x.body, entry, ctx);
                return mk_sentence(std::move(w), s->span);
            } else if constexpr (std::is_same_v<T, SFor> || std::is_same_v<T, SMap>) {
                throw std::logic_error(s->span.str() +
                                       ": 'for'/'map' must be expanded before strengthening");
            } else {
                return s;  // assignments, locals, calls, skip are unchanged
            }
        },
        s->node);
}

// Strengthen a procedure's loop invariants starting from the frozen
// precondition, and augment the postcondition with the locals-closed exit
// predicate as an additional inferred-origin clause.
inline Procedure strengthen_procedure(const Program& prog, const Procedure& proc,
                                      const TypeEnv& env) {
    CalcCtx ctx = CalcCtx::for_procedure(prog, proc, env, EmitMode::Ignore);
    Predicate p0 = frozen_precondition(proc);
    Procedure out = proc;
    out.body = strengthen_sentence(proc.body, p0, ctx);
    Predicate exit = post(out.body, p0, ctx);
    exit = mk_unbounded_exists(local_vars(*out.body), exit, proc.span);
    out.post.push_back({exit, Origin::Inferred});
    return out;
}

// Procedures are strengthened in definition order so that later ones see
// the already-strengthened contracts of their callees.
inline Program strengthen_program(const Program& prog, const TypeEnvs& envs) {
    Program out;
    for (const auto& proc : prog.procedures) {
        Procedure st = strengthen_procedure(out, proc, envs.at(proc.name));
        out.procedures.push_back(std::move(st));
    }
    return out;
}

}  // namespace pest
