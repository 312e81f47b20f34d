#pragma once

#include "pest/infer.hpp"
#include "pest/solver.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pest {

struct VcOutcome {
    VC vc;
    Verdict verdict;
};

struct ProcReport {
    std::string procedure;
    bool pass = false;
    bool erasable = false;  // all annotation checks may be erased
    std::vector<VcOutcome> vcs;
};

struct VerifyReport {
    std::vector<ProcReport> procedures;

    bool all_pass() const {
        for (const auto& p : procedures)
            if (!p.pass) return false;
        return true;
    }
};

struct VerifyOptions {
    SolverConfig solver;
    bool cbc_skip = true;  // skip VCs for correct-by-construction invariants
};

// Realize the static semantics as verification conditions: a strongest-
// postcondition traversal from the frozen precondition threads a symbolic
// predicate through the body and emits one VC per rule premise; the final VC
// requires the exit predicate (locals closed out) to entail the declared
// postcondition. Synthesized (inferred-origin) postcondition clauses are
// correct by construction and carry no final VC.
inline std::pair<std::vector<VC>, Predicate> vcs_for_procedure(const Program& prog,
                                                               const Procedure& proc,
                                                               const TypeEnv& env) {
    std::vector<VC> vcs;
    CalcCtx ctx = CalcCtx::for_procedure(prog, proc, env, EmitMode::Collect);
    ctx.out = &vcs;

    Predicate exit = post(proc.body, frozen_precondition(proc), ctx);
    exit = mk_unbounded_exists(local_vars(*proc.body), exit, proc.span);

    std::vector<ExprPtr> declared;
    for (const auto& c : proc.post)
        if (c.origin == Origin::Declared) declared.push_back(c.pred);
    if (!declared.empty())
        ctx.emit("POST/established", exit, mk_conj(declared),
                 declared.front()->span.valid() ? declared.front()->span : proc.span);
    return {std::move(vcs), exit};
}

// Verify procedures in definition order; each may assume the contracts of
// the procedures before it. Failures are data in the report, not errors.
inline VerifyReport verify_program(const Program& prog, const TypeEnvs& envs,
                                   const VerifyOptions& options) {
    VerifyReport report;
    std::vector<VC> to_check;
    std::map<std::string, Verdict> preset;

    for (const auto& proc : prog.procedures) {
        ProcReport pr;
        pr.procedure = proc.name;
        auto [vcs, exit] = vcs_for_procedure(prog, proc, envs.at(proc.name));
        for (auto& vc : vcs) {
            if (vc.cbc && options.cbc_skip) preset.emplace(vc.id, Verdict::skipped_cbc());
            else to_check.push_back(vc);
            pr.vcs.push_back({std::move(vc), Verdict{}});
        }
        report.procedures.push_back(std::move(pr));
    }

    std::map<std::string, Verdict> verdicts = dispatch(to_check, options.solver);
    verdicts.insert(preset.begin(), preset.end());

    for (auto& pr : report.procedures) {
        bool pass = true;
        for (auto& out : pr.vcs) {
            auto it = verdicts.find(out.vc.id);
            out.verdict = it != verdicts.end()
                              ? it->second
                              : Verdict::unknown("not checked");
            if (!out.verdict.passed()) pass = false;
        }
        pr.pass = pass;
        pr.erasable = pass;
    }
    return report;
}

}  // namespace pest
