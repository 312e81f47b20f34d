#pragma once

#include "pest/infer.hpp"
#include "pest/parser.hpp"
#include "pest/strengthen.hpp"
#include "pest/sugar.hpp"
#include "pest/types.hpp"
#include "pest/verify.hpp"

#include <string>

namespace pest {

// Fill in missing contracts: a procedure without a declared precondition
// gets P = pre(body, true). (Postconditions are already covered by the
// strengthening pass, which appends the exit predicate as a clause; a
// procedure with no postcondition at all also gets Q.) Side conditions are
// not checked here; an unprovable loop surfaces as failing VCs in the
// verify phase, where the same premises are emitted again.
inline Program infer_missing_contracts(const Program& prog, const TypeEnvs& envs) {
    Program out;
    for (const auto& proc : prog.procedures) {
        Procedure p = proc;
        if (p.pre.empty() || p.post.empty()) {
            CalcCtx ctx = CalcCtx::for_procedure(out, p, envs.at(p.name), EmitMode::Ignore);
            if (p.pre.empty()) {
                Predicate P = pre(p.body, mk_true(p.span), ctx);
                p.pre.push_back({P, Origin::Inferred});
            }
            if (p.post.empty()) {
                Predicate start = frozen_precondition(p);
                Predicate Q = post(p.body, start, ctx);
                Q = mk_unbounded_exists(local_vars(*p.body), Q, p.span);
                p.post.push_back({Q, Origin::Inferred});
            }
        }
        out.procedures.push_back(std::move(p));
    }
    return out;
}

struct PipelineOptions {
    SolverConfig solver;
    bool cbc_skip = true;
};

struct PipelineResult {
    Program program;  // desugared, strengthened, contracts completed
    TypeEnvs envs;
    VerifyReport report;
};

// Default order: expand sugar, strengthen annotations (so guessed invariants
// carry frame facts), complete missing contracts, then verify.
inline PipelineResult run_pipeline(const Program& parsed, const PipelineOptions& options) {
    TypeEnvs envs = infer_types(parsed);
    Program desugared = desugar_program(parsed, envs);
    envs = infer_types(desugared);
    Program strengthened = strengthen_program(desugared, envs);
    Program completed = infer_missing_contracts(strengthened, envs);
    VerifyReport report = verify_program(completed, envs, {options.solver, options.cbc_skip});
    return {std::move(completed), std::move(envs), std::move(report)};
}

inline PipelineResult run_pipeline(std::string_view source, const PipelineOptions& options,
                                   ParseOptions popts = {}) {
    return run_pipeline(parse_program(source, popts), options);
}

}  // namespace pest
