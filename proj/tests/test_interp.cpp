#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pest;
using pest_test::parse_corpus;
using pest_test::StateGen;

namespace {

Value iv(long long n) { return Value{Int(n)}; }
Value av(std::initializer_list<long long> xs) {
    Arr a;
    for (long long x : xs) a.push_back(Int(x));
    return Value{std::move(a)};
}

}  // namespace

TEST_CASE("expression evaluation basics") {
    State s{{"a", iv(3)}, {"b", iv(7)}};
    auto r = eval_expr(s, *parse_expr_text("a >= b"));
    REQUIRE(r);
    CHECK(*r == Value{false});

    State s2{{"A", av({2, 9, 4})}, {"m", iv(9)}};
    auto r2 = eval_expr(s2, *parse_expr_text("exists-k / 0 <= k < |A| : m = A[k]"));
    REQUIRE(r2);
    CHECK(*r2 == Value{true});

    State s3{{"a", av({1})}, {"i", iv(1)}, {"y", iv(2)}};
    Undef why;
    CHECK(!eval_expr(s3, *parse_expr_text("a[i] / y"), &why));
    CHECK(why.reason.find("out of range") != std::string::npos);
}

TEST_CASE("division truncates toward zero, modulo takes the dividend sign") {
    State s;
    auto val = [&](const char* text) {
        auto r = eval_expr(s, *parse_expr_text(text));
        REQUIRE(r);
        return std::get<Int>(*r);
    };
    CHECK(val("7 / 2") == 3);
    CHECK(val("-7 / 2") == -3);
    CHECK(val("7 / -2") == -3);
    CHECK(val("-7 / -2") == 3);
    CHECK(val("7 % 2") == 1);
    CHECK(val("-7 % 2") == -1);
    CHECK(val("7 % -2") == 1);
    CHECK(val("-7 % -2") == -1);
    CHECK(!eval_expr(s, *parse_expr_text("1 / 0")));
    CHECK(!eval_expr(s, *parse_expr_text("1 % 0")));
}

TEST_CASE("bounded quantifiers iterate lo..hi-1 and short-circuit") {
    State s{{"A", av({1, 2, 3})}};
    auto ev = [&](const char* text) { return eval_expr(s, *parse_expr_text(text)); };
    CHECK(*ev("forall-k / 0 <= k < 0 : false") == Value{true});   // empty range
    CHECK(*ev("exists-k / 5 <= k < 3 : true") == Value{false});   // empty range
    CHECK(*ev("forall-k / 0 <= k < |A| : A[k] > 0") == Value{true});
    // undefined body cell is never reached once the answer is known
    CHECK(*ev("exists-k / 0 <= k < 9 : A[0] = 1") == Value{true});
    CHECK(!ev("forall-k / 0 <= k < 9 : A[k] > 0"));
}

TEST_CASE("update builds a new array") {
    State s{{"A", av({1, 2, 3})}};
    auto r = eval_expr(s, *parse_expr_text("update A on 1 with 9"));
    REQUIRE(r);
    CHECK(*r == av({1, 9, 3}));
    CHECK(s.at("A") == av({1, 2, 3}));
    CHECK(!eval_expr(s, *parse_expr_text("update A on 3 with 9")));
}

TEST_CASE("array equality is elementwise plus equal length") {
    State s{{"A", av({1, 2})}, {"B", av({1, 2})}, {"C", av({1, 2, 3})}};
    CHECK(*eval_expr(s, *parse_expr_text("A = B")) == Value{true});
    CHECK(*eval_expr(s, *parse_expr_text("A = C")) == Value{false});
    CHECK(*eval_expr(s, *parse_expr_text("A /= C")) == Value{true});
}

TEST_CASE("max runs to the expected final state in both modes") {
    Program prog = parse_corpus("max.pest");
    for (RunMode mode : {RunMode::Checked, RunMode::Erased}) {
        RunResult r = run_procedure(prog, "max", {iv(3), iv(7), iv(0)}, {mode});
        const auto* fin = std::get_if<State>(&r);
        REQUIRE(fin);
        CHECK(fin->at("c") == iv(7));
        CHECK(fin->at("a") == iv(3));
    }
}

TEST_CASE("arrayMax computes the maximum and leaves A unchanged") {
    Program prog = parse_corpus("arrayMax.pest");
    RunResult r = run_procedure(prog, "arrayMax", {av({2, 9, 4}), iv(0)}, {});
    const auto* fin = std::get_if<State>(&r);
    REQUIRE(fin);
    CHECK(fin->at("m") == iv(9));
    CHECK(fin->at("A") == av({2, 9, 4}));
}

TEST_CASE("empty array violates arrayMax's precondition") {
    Program prog = parse_corpus("arrayMax.pest");
    RunResult r = run_procedure(prog, "arrayMax", {av({}), iv(0)}, {});
    const auto* stuck = std::get_if<StuckReason>(&r);
    REQUIRE(stuck);
    CHECK(stuck->kind == StuckKind::PreconditionFailed);
}

TEST_CASE("a broken invariant fails at its first check") {
    std::string source = pest_test::read_corpus("negative/weak_invariant.pest");
    Program prog = parse_program(source);
    RunResult r = run_procedure(prog, "arrayMax", {av({2, 9, 4}), iv(0)}, {});
    const auto* stuck = std::get_if<StuckReason>(&r);
    REQUIRE(stuck);
    CHECK(stuck->kind == StuckKind::InvariantFailed);  // 2 <= i fails at i = 1
}

TEST_CASE("variant violations are detected") {
    Program bad = parse_program(
        "p(x) :? x > 0 { while x > 0 :?! x >= 0 :# x do skip od }");
    RunResult r = run_procedure(bad, "p", {iv(2)}, {});
    const auto* stuck = std::get_if<StuckReason>(&r);
    REQUIRE(stuck);
    CHECK(stuck->kind == StuckKind::VariantNotDecreased);

    Program neg = parse_program(
        "p(x) :? x = 0 { while x = 0 :?! true :# x do x <- x - 1 od }");
    RunResult r2 = run_procedure(neg, "p", {iv(0)}, {});
    const auto* stuck2 = std::get_if<StuckReason>(&r2);
    REQUIRE(stuck2);
    CHECK(stuck2->kind == StuckKind::VariantNotPositive);
}

TEST_CASE("the invariant is checked before the final guard evaluation") {
    // invariant x /= 0 holds during the loop but not when the guard goes false
    Program prog = parse_program(
        "p(x) :? x = 2 { while x > 0 :?! x /= 0 :# x + 1 do x <- x - 2 od }");
    RunResult r = run_procedure(prog, "p", {iv(2)}, {});
    const auto* stuck = std::get_if<StuckReason>(&r);
    REQUIRE(stuck);
    CHECK(stuck->kind == StuckKind::InvariantFailed);
}

TEST_CASE("erased mode skips annotations but still traps undefined code") {
    Program prog = parse_program(
        "p(x, y) :? false { x <- y / x }");
    RunResult checked = run_procedure(prog, "p", {iv(0), iv(1)}, {RunMode::Checked});
    CHECK(std::get<StuckReason>(checked).kind == StuckKind::PreconditionFailed);
    RunResult erased = run_procedure(prog, "p", {iv(0), iv(1)}, {RunMode::Erased});
    CHECK(std::get<StuckReason>(erased).kind == StuckKind::UndefinedExpression);
}

TEST_CASE("fuel guards non-terminating loops") {
    Program prog = parse_program("p(x) { while true :?! true :# 1 do skip od }");
    ExecOptions opts;
    opts.mode = RunMode::Erased;  // otherwise the variant check fires first
    opts.fuel = 100;
    RunResult r = run_procedure(prog, "p", {iv(0)}, opts);
    CHECK(std::get<StuckReason>(r).kind == StuckKind::FuelExhausted);
}

TEST_CASE("copy-in/copy-out makes aliasing impossible") {
    Program prog = parse_corpus("swap.pest");
    RunResult r = run_procedure(prog, "useSwap", {iv(1), iv(2)}, {});
    const auto* fin = std::get_if<State>(&r);
    REQUIRE(fin);
    CHECK(fin->at("x") == iv(2));
    CHECK(fin->at("y") == iv(1));
}

TEST_CASE("arrayInc (while version) increments every element") {
    Program prog = parse_corpus("arrayInc_while.pest");
    RunResult r = run_procedure(prog, "arrayInc", {av({1, 2, 3})}, {});
    const auto* fin = std::get_if<State>(&r);
    REQUIRE(fin);
    CHECK(fin->at("A") == av({2, 3, 4}));
}

TEST_CASE("loop-body locals disappear between iterations and after the loop") {
    Program prog = parse_corpus("arrayMax.pest");
    RunResult r = run_procedure(prog, "arrayMax", {av({5, 1}), iv(0)}, {});
    const auto* fin = std::get_if<State>(&r);
    REQUIRE(fin);
    CHECK(!fin->count("t"));
    CHECK(!fin->count("e"));
    CHECK(fin->count("i"));  // procedure-level local survives
}

TEST_CASE("execution is deterministic") {
    Program prog = parse_corpus("arrayMax.pest");
    TypeEnvs envs = infer_types(prog);
    StateGen gen(23);
    const Procedure* p = prog.find("arrayMax");
    for (int t = 0; t < 50; ++t) {
        auto args = gen.args_satisfying_pre(*p, envs.at("arrayMax"));
        RunResult a = run_procedure(prog, "arrayMax", args, {});
        RunResult b = run_procedure(prog, "arrayMax", args, {});
        REQUIRE(std::holds_alternative<State>(a));
        CHECK(std::get<State>(a) == std::get<State>(b));
    }
}

TEST_CASE("for and map are rejected unless direct-iteration is requested") {
    Program prog = parse_corpus("easyArrayMax.pest");
    CHECK_THROWS_AS(run_procedure(prog, "easyArrayMax", {av({1, 2}), iv(0)}, {}),
                    std::logic_error);
    ExecOptions direct;
    direct.direct_sugar = true;
    RunResult r = run_procedure(prog, "easyArrayMax", {av({2, 9, 4}), iv(0)}, direct);
    const auto* fin = std::get_if<State>(&r);
    REQUIRE(fin);
    CHECK(fin->at("m") == iv(9));
}
