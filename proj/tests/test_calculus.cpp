#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pest;
using pest_test::oracle_cfg;
using pest_test::oracle_equivalent;
using pest_test::parse_corpus;

namespace {

struct ProcSetup {
    Program prog;
    TypeEnvs envs;
    const Procedure* proc;

    CalcCtx collect_ctx(std::vector<VC>* out) const {
        CalcCtx ctx = CalcCtx::for_procedure(prog, *proc, envs.at(proc->name), EmitMode::Collect);
        ctx.out = out;
        return ctx;
    }
};

ProcSetup setup(const std::string& source, const std::string& name) {
    ProcSetup s{parse_program(source), {}, nullptr};
    s.envs = infer_types(s.prog);
    s.proc = s.prog.find(name);
    REQUIRE(s.proc);
    return s;
}

ProcSetup setup_corpus(const std::string& file, const std::string& name) {
    ProcSetup s{parse_corpus(file), {}, nullptr};
    s.envs = infer_types(s.prog);
    s.proc = s.prog.find(name);
    REQUIRE(s.proc);
    return s;
}

// Pre/post equivalence of two contracts. Preconditions are compared under
// the entry convention that parameters equal their @pre copies.
bool pre_equivalent(const Predicate& p1, const Predicate& p2, const Procedure& proc,
                    const TypeEnv& env) {
    Predicate freeze = mk_true();
    for (const auto& prm : proc.params)
        freeze = mk_and(freeze, mk_eq(mk_var(prm), mk_at_pre(prm)));
    SolverConfig cfg = oracle_cfg();
    return oracle_check(mk_and(freeze, p1), p2, env, cfg).passed() &&
           oracle_check(mk_and(freeze, p2), p1, env, cfg).passed();
}

}  // namespace

TEST_CASE("post of an assignment is the strongest consequence") {
    auto s = setup("p(a, b, c) :? a >= b { c <- a }", "p");
    std::vector<VC> vcs;
    CalcCtx ctx = s.collect_ctx(&vcs);
    Predicate q = post(s.proc->body, parse_expr_text("a >= b"), ctx);
    CHECK(oracle_equivalent(q, parse_expr_text("a >= b && c = a"), ctx.env, oracle_cfg()));
}

TEST_CASE("post of skip is the identity") {
    auto s = setup("p(x) :? x >= 0 { skip }", "p");
    std::vector<VC> vcs;
    CalcCtx ctx = s.collect_ctx(&vcs);
    Predicate p = parse_expr_text("x > 0");
    CHECK(struct_eq(post(s.proc->body, p, ctx), p));
}

TEST_CASE("post of a while is inv and not guard") {
    auto s = setup_corpus("arrayMax.pest", "arrayMax");
    std::vector<VC> vcs;
    CalcCtx ctx = s.collect_ctx(&vcs);
    Predicate exit = post(s.proc->body, frozen_precondition(*s.proc), ctx);
    // exit is (conj of invariants) && !(i < |A|)
    const auto* conj = exit->as<Binary>();
    REQUIRE(conj);
    CHECK(conj->op == BinaryOp::And);
    const auto* neg = conj->rhs->as<Unary>();
    REQUIRE(neg);
    CHECK(neg->op == UnaryOp::Not);
    CHECK(struct_eq(neg->arg, parse_expr_text("i < |A|")));
}

TEST_CASE("pre of assignments is safety plus substitution") {
    auto s = setup("p(a, c) :? a >= 0 { c <- a }", "p");
    std::vector<VC> vcs;
    CalcCtx ctx = s.collect_ctx(&vcs);
    Predicate p = pre(s.proc->body, parse_expr_text("c = a"), ctx);
    CHECK(is_true_lit(*simplify(p)));

    auto s2 = setup("q(a, i, x) { x <- a[i] }", "q");
    CalcCtx ctx2 = s2.collect_ctx(&vcs);
    Predicate p2 = pre(s2.proc->body, mk_true(), ctx2);
    CHECK(oracle_equivalent(p2, parse_expr_text("0 <= i && i < |a|"), ctx2.env, oracle_cfg()));
}

TEST_CASE("side conditions are checked during inference") {
    // reading a[i] with nothing known about i fails the safety side condition
    auto s = setup("q(a, i, x) :? true { x <- a[i] }", "q");
    CalcCtx ctx = CalcCtx::for_procedure(s.prog, *s.proc, s.envs.at("q"), EmitMode::Check);
    SolverConfig cfg = oracle_cfg();
    ctx.cfg = &cfg;
    try {
        post(s.proc->body, frozen_precondition(*s.proc), ctx);
        FAIL("expected SideConditionFailure");
    } catch (const SideConditionFailure& e) {
        CHECK(e.vc.rule == "S-ASSIGN/safe");
        CHECK(e.verdict.kind == Verdict::Kind::Invalid);
    }
}

TEST_CASE("golden VC shape for the two-way maximum") {
    auto s = setup_corpus("max.pest", "max");
    auto [vcs, exit] = vcs_for_procedure(s.prog, *s.proc, s.envs.at("max"));
    // locked after the first correct run of this traversal: guard safety,
    // two assignment safeties, and the final postcondition entailment
    REQUIRE(vcs.size() == 4);
    CHECK(vcs[0].rule == "S-IF/safe-guard");
    CHECK(vcs[1].rule == "S-ASSIGN/safe");
    CHECK(vcs[2].rule == "S-ASSIGN/safe");
    CHECK(vcs[3].rule == "POST/established");
    for (const auto& vc : vcs) CHECK(vc.span.valid());
}

TEST_CASE("fig 1 verifies with zero failing VCs") {
    auto s = setup_corpus("max.pest", "max");
    VerifyReport report = verify_program(s.prog, s.envs, {oracle_cfg()});
    REQUIRE(report.procedures.size() == 1);
    CHECK(report.procedures[0].pass);
    CHECK(report.procedures[0].erasable);
}

TEST_CASE("fig 2 verifies with zero failing VCs") {
    auto s = setup_corpus("arrayMax.pest", "arrayMax");
    VerifyReport report = verify_program(s.prog, s.envs, {oracle_cfg()});
    REQUIRE(report.procedures.size() == 2);
    for (const auto& pr : report.procedures) {
        INFO(pr.procedure);
        for (const auto& out : pr.vcs) {
            INFO(out.vc.id << " -> " << verdict_name(out.verdict.kind)
                           << (out.verdict.counterexample
                                   ? " " + state_to_string(*out.verdict.counterexample)
                                   : ""));
            CHECK(out.verdict.passed());
        }
        CHECK(pr.pass);
    }
}

TEST_CASE("a constant variant fails its decrease VC") {
    auto s = setup("p(x) :? x >= 0 { while true :?! true :# 1 do skip od }", "p");
    VerifyReport report = verify_program(s.prog, s.envs, {oracle_cfg()});
    REQUIRE(report.procedures.size() == 1);
    CHECK(!report.procedures[0].pass);
    bool found = false;
    for (const auto& out : report.procedures[0].vcs) {
        if (out.vc.rule == "S-WHILE/variant-decreases") {
            found = true;
            CHECK(out.verdict.kind == Verdict::Kind::Invalid);
        }
    }
    CHECK(found);
}

TEST_CASE("deleting the exists clause from arrayMax's invariant breaks the final VC") {
    std::string source = pest_test::read_corpus("arrayMax.pest");
    auto pos = source.find(":?! exists-k / 0 <= k < i : m = A[k]\n");
    REQUIRE(pos != std::string::npos);
    source.erase(pos, std::string(":?! exists-k / 0 <= k < i : m = A[k]\n").size());
    Program prog = parse_program(source);
    TypeEnvs envs = infer_types(prog);
    VerifyReport report = verify_program(prog, envs, {oracle_cfg()});
    const ProcReport& pr = report.procedures[1];
    CHECK(!pr.pass);
    bool post_failed = false;
    for (const auto& out : pr.vcs)
        if (out.vc.rule == "POST/established" && out.verdict.kind == Verdict::Kind::Invalid)
            post_failed = true;
    CHECK(post_failed);
}

TEST_CASE("verifier and calculus agree on side conditions") {
    // collect-mode VCs, checked afterwards, match check-mode outcomes
    auto s = setup_corpus("arrayMax.pest", "arrayMax");
    auto [vcs, exit] = vcs_for_procedure(s.prog, *s.proc, s.envs.at("arrayMax"));
    SolverConfig cfg = oracle_cfg();
    CalcCtx ctx = CalcCtx::for_procedure(s.prog, *s.proc, s.envs.at("arrayMax"), EmitMode::Check);
    ctx.cfg = &cfg;
    CHECK_NOTHROW(post(s.proc->body, frozen_precondition(*s.proc), ctx));
    for (const auto& vc : vcs) {
        INFO(vc.id);
        CHECK(check_entailment(vc, cfg).passed());
    }
}

TEST_CASE("contract inference reproduces the declared max contract") {
    auto bare = setup(
        "max(a, b, c)\n"
        "{\n"
        "  if a >= b then\n"
        "    c <- a\n"
        "  else\n"
        "    c <- b\n"
        "  fi\n"
        "}\n",
        "max");
    InferredContract inferred =
        infer_contract(bare.prog, *bare.proc, bare.envs.at("max"), oracle_cfg());

    auto declared = setup_corpus("max.pest", "max");
    CHECK(pre_equivalent(inferred.pre, declared.proc->pre_conj(), *bare.proc,
                          bare.envs.at("max")));
    TypeEnv env = bare.envs.at("max");
    CHECK(oracle_equivalent(inferred.post, declared.proc->post_conj(), env, oracle_cfg()));
}

TEST_CASE("a skip body infers the frame contract") {
    auto s = setup("keep(x, y) :? x <= y { skip }", "keep");
    InferredContract c = infer_contract(s.prog, *s.proc, s.envs.at("keep"), oracle_cfg());
    CHECK(is_true_lit(*simplify(c.pre)));
    CHECK(oracle_equivalent(c.post, parse_expr_text("x = x@pre && y = y@pre"),
                            s.envs.at("keep"), oracle_cfg()));
}

TEST_CASE("re-annotating a procedure with its inferred contract verifies") {
    auto s = setup_corpus("arrayInc_while.pest", "arrayInc");
    InferredContract c = infer_contract(s.prog, *s.proc, s.envs.at("arrayInc"), oracle_cfg());
    Program annotated = s.prog;
    annotated.procedures[0].pre = {{c.pre, Origin::Declared}};
    annotated.procedures[0].post = {{c.post, Origin::Declared}};
    VerifyReport report = verify_program(annotated, s.envs, {oracle_cfg()});
    for (const auto& out : report.procedures[0].vcs) {
        INFO(out.vc.id);
        CHECK(out.verdict.kind != Verdict::Kind::Invalid);
    }
    CHECK(report.procedures[0].pass);
}

TEST_CASE("strengthening adds frame facts to invariants") {
    // j is not modified by the loop, so j = 5 survives into the invariant
    auto s = setup(
        "p(j, x)\n"
        ":? j = 5\n"
        "{\n"
        "  while x > 0 :?! x >= 0 :# x do x <- x - 1 od\n"
        "}\n",
        "p");
    Procedure st = strengthen_procedure(s.prog, *s.proc, s.envs.at("p"));
    const auto* loop = st.body->as<SWhile>();
    REQUIRE(loop);
    REQUIRE(loop->invariants.size() == 2);
    CHECK(loop->invariants[1].origin == Origin::Inferred);
    SolverConfig cfg = oracle_cfg();
    TypeEnv env = s.envs.at("p");
    CHECK(oracle_check(loop->invariants[1].pred, parse_expr_text("j = 5"), env, cfg).passed());
}

TEST_CASE("strengthening under a true entry leaves invariants equivalent") {
    auto s = setup(
        "p(x) { while x > 0 :?! x >= 0 :# x do x <- x - 1 od }", "p");
    CalcCtx ctx = CalcCtx::for_procedure(s.prog, *s.proc, s.envs.at("p"), EmitMode::Ignore);
    SentencePtr st = strengthen_sentence(s.proc->body, mk_true(), ctx);
    const auto* loop = st->as<SWhile>();
    REQUIRE(loop);
    REQUIRE(loop->invariants.size() == 2);
    CHECK(is_true_lit(*simplify(loop->invariants[1].pred)));
}

TEST_CASE("strengthening a passing procedure keeps it passing") {
    for (const char* file : {"max.pest", "arrayMax.pest", "swap.pest"}) {
        INFO(file);
        Program prog = parse_corpus(file);
        TypeEnvs envs = infer_types(prog);
        Program st = strengthen_program(prog, envs);
        VerifyReport report = verify_program(st, envs, {oracle_cfg()});
        for (const auto& pr : report.procedures) {
            INFO(pr.procedure);
            for (const auto& out : pr.vcs) {
                INFO(out.vc.id << " -> " << verdict_name(out.verdict.kind));
                CHECK(out.verdict.passed());
            }
        }
        CHECK(report.all_pass());
    }
}

TEST_CASE("strengthening twice is equivalent to strengthening once") {
    auto s = setup(
        "p(j, x)\n"
        ":? j = 5 && x = 2\n"
        "{\n"
        "  while x > 0 :?! x >= 0 :# x do x <- x - 1 od\n"
        "}\n",
        "p");
    Procedure once = strengthen_procedure(s.prog, *s.proc, s.envs.at("p"));
    Procedure twice = strengthen_procedure(s.prog, once, s.envs.at("p"));
    const auto* l1 = once.body->as<SWhile>();
    const auto* l2 = twice.body->as<SWhile>();
    std::vector<ExprPtr> i1, i2;
    for (const auto& c : l1->invariants) i1.push_back(c.pred);
    for (const auto& c : l2->invariants) i2.push_back(c.pred);
    CHECK(oracle_equivalent(mk_conj(i1), mk_conj(i2), s.envs.at("p"), oracle_cfg()));
}

TEST_CASE("a procedure whose postcondition is only inferred has no final VC") {
    auto s = setup("p(x) { x <- x + 1 }", "p");
    Procedure st = strengthen_procedure(s.prog, *s.proc, s.envs.at("p"));
    Program prog2;
    prog2.procedures.push_back(st);
    auto [vcs, exit] = vcs_for_procedure(prog2, st, s.envs.at("p"));
    for (const auto& vc : vcs) CHECK(vc.rule != "POST/established");
}
