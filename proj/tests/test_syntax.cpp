#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace pest;
using pest_test::parse_corpus;
using pest_test::read_corpus;

TEST_CASE("fig 1 parses to the expected structure") {
    Program prog = parse_corpus("max.pest");
    REQUIRE(prog.procedures.size() == 1);
    const Procedure& p = prog.procedures[0];
    CHECK(p.name == "max");
    CHECK(p.params == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(p.pre.size() == 1);
    CHECK(is_true_lit(*p.pre[0].pred));
    REQUIRE(p.post.size() == 2);

    // first post clause: (a >= b => c = a) && (a < b => c = b)
    const auto* conj = p.post[0].pred->as<Binary>();
    REQUIRE(conj);
    CHECK(conj->op == BinaryOp::And);
    const auto* lhs = conj->lhs->as<Binary>();
    REQUIRE(lhs);
    CHECK(lhs->op == BinaryOp::Imp);

    // second post clause mentions a@pre and b@pre
    auto fv = free_vars(p.post[1].pred);
    CHECK(fv.count("a@pre"));
    CHECK(fv.count("b@pre"));

    const auto* body = p.body->as<SIf>();
    REQUIRE(body);
    CHECK(body->then_branch->is<SAssign>());
    CHECK(body->else_branch->is<SAssign>());
}

TEST_CASE("empty contract and skip body") {
    Program prog = parse_program("p(x) { skip }");
    const Procedure& p = prog.procedures[0];
    CHECK(p.pre.empty());
    CHECK(p.post.empty());
    CHECK(p.body->is<SSkip>());
}

TEST_CASE("fig 3 source contains a for node") {
    Program prog = parse_corpus("easyArrayMax.pest");
    const Procedure* p = prog.find("easyArrayMax");
    REQUIRE(p);
    const auto* seq = p->body->as<SSeq>();
    REQUIRE(seq);
    const auto* f = seq->second->as<SFor>();
    REQUIRE(f);
    CHECK(f->index == "i");
    const auto* lo = f->lo->as<IntLit>();
    REQUIRE(lo);
    CHECK(lo->value == 1);
    CHECK(f->hi->is<ArraySize>());
}

TEST_CASE("chained comparison expands to a conjunction") {
    ExprPtr e = parse_expr_text("1 <= i <= n");
    const auto* conj = e->as<Binary>();
    REQUIRE(conj);
    CHECK(conj->op == BinaryOp::And);
    CHECK(struct_eq(e, parse_expr_text("1 <= i && i <= n")));
}

TEST_CASE("element assignment sugar becomes an update") {
    Program prog = parse_program("p(A, x) { A[x] <- A[x] + 1 }");
    const auto* assign = prog.procedures[0].body->as<SAssign>();
    REQUIRE(assign);
    CHECK(assign->target == "A");
    CHECK(assign->value->is<ArrayUpdate>());
}

TEST_CASE("operator precedence and associativity") {
    CHECK(struct_eq(parse_expr_text("a => b => c"), parse_expr_text("a => (b => c)")));
    CHECK(struct_eq(parse_expr_text("a || b && c"), parse_expr_text("a || (b && c)")));
    CHECK(struct_eq(parse_expr_text("!a && b"), parse_expr_text("(!a) && b")));
    CHECK(struct_eq(parse_expr_text("! x < y"), parse_expr_text("!(x < y)")));
    CHECK(struct_eq(parse_expr_text("a - b - c"), parse_expr_text("(a - b) - c")));
    CHECK(struct_eq(parse_expr_text("a + b * c"), parse_expr_text("a + (b * c)")));
    CHECK(struct_eq(parse_expr_text("-x % y"), parse_expr_text("(-x) % y")));
}

TEST_CASE("quantifier body extends greedily to the right") {
    ExprPtr e = parse_expr_text("forall-k / 0 <= k < n : A[k] >= 0 && m >= A[k]");
    const auto* q = e->as<BoundedQuant>();
    REQUIRE(q);
    CHECK(q->body->as<Binary>()->op == BinaryOp::And);
}

TEST_CASE("round trip: parse . print . parse is identity on the corpus") {
    for (const char* name :
         {"max.pest", "arrayMax.pest", "easyArrayMax.pest", "arrayInc_while.pest",
          "arrayInc_map.pest", "swap.pest", "refreshTwice.pest", "prefixFill.pest"}) {
        INFO(name);
        Program first = parse_corpus(name);
        std::string printed = pretty_print(first);
        INFO(printed);
        Program second = parse_program(printed);
        REQUIRE(first.procedures.size() == second.procedures.size());
        std::string reprinted = pretty_print(second);
        CHECK(printed == reprinted);
    }
}

TEST_CASE("printed expressions reparse to the same tree") {
    for (const char* text : {
             "(a >= b => c = a) && (a < b => c = b)",
             "forall-k / 0 <= k < |A| : m >= A[k]",
             "update A on i with A[i] + 1",
             "|A| - i",
             "a = a@pre && b = b@pre",
             "x /= 0 => y / x > 0",
             "-3 % x",
             "(forall-k / 0 <= k < n : A[k] = 0) && n > 0",
         }) {
        INFO(text);
        ExprPtr once = parse_expr_text(text);
        ExprPtr twice = parse_expr_text(pretty_print(once));
        CHECK(struct_eq(once, twice));
    }
}

TEST_CASE("internal exists syntax round-trips only with the flag") {
    ExprPtr closure = existential_closure(parse_expr_text("i = 5 && m >= 0"), {"i"});
    std::string printed = pretty_print(closure);
    CHECK(printed.find("exists i") != std::string::npos);
    CHECK_THROWS_AS(parse_expr_text(printed), ParseError);
    ExprPtr back = parse_expr_text(printed, {.internal = true});
    CHECK(struct_eq(closure, back));
}

TEST_CASE("every parsed node carries a span") {
    Program prog = parse_corpus("arrayMax.pest");
    const Procedure* p = prog.find("arrayMax");
    REQUIRE(p->span.valid());
    const auto* seq = p->body->as<SSeq>();
    REQUIRE(seq);
    CHECK(seq->first->span.valid());
    CHECK(seq->first->as<SAssign>()->value->span.valid());
}

TEST_CASE("parse errors carry positions and expectations") {
    try {
        parse_program("max(a, b { skip }");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span.line == 1);
        CHECK(!e.expected_tokens.empty());
    }
}

TEST_CASE("static validation catches bad programs") {
    CHECK_THROWS_WITH(parse_program("p(x) { skip }  p(y) { skip }"),
                      Catch::Matchers::ContainsSubstring("duplicate procedure"));
    CHECK_THROWS_WITH(parse_program("p(x, x) { skip }"),
                      Catch::Matchers::ContainsSubstring("repeated parameters"));
    CHECK_THROWS_WITH(parse_program("p(x) { call q(x) }"),
                      Catch::Matchers::ContainsSubstring("later-defined"));
    CHECK_THROWS_WITH(parse_program("p(x) { call p(x) }"),
                      Catch::Matchers::ContainsSubstring("recursive"));
    CHECK_THROWS_WITH(parse_program("q(a) { skip }  p(x, y) { call q(x, y) }"),
                      Catch::Matchers::ContainsSubstring("takes 1 argument"));
    CHECK_THROWS_WITH(parse_program("q(a, b) { skip }  p(x) { call q(x, x) }"),
                      Catch::Matchers::ContainsSubstring("distinct"));
    CHECK_THROWS_WITH(parse_program("p(x) { local x <- 1 }"),
                      Catch::Matchers::ContainsSubstring("shadows"));
    CHECK_THROWS_WITH(parse_program("p(x) { y <- 1 }"),
                      Catch::Matchers::ContainsSubstring("unknown variable"));
    CHECK_THROWS_WITH(parse_program("p(x) :! y@pre = 1 { skip }"),
                      Catch::Matchers::ContainsSubstring("parameter"));
}

TEST_CASE("loops need at least one invariant and exactly one variant") {
    CHECK_THROWS_WITH(parse_program("p(x) { while x > 0 :# x do x <- x - 1 od }"),
                      Catch::Matchers::ContainsSubstring("invariant"));
    CHECK_THROWS_WITH(parse_program("p(x) { while x > 0 :?! x >= 0 do x <- x - 1 od }"),
                      Catch::Matchers::ContainsSubstring("variant"));
    CHECK_THROWS_WITH(
        parse_program("p(x) { while x > 0 :?! x >= 0 :# x :# x + 1 do x <- x - 1 od }"),
        Catch::Matchers::ContainsSubstring("exactly one variant"));
}

TEST_CASE("if requires an else branch") {
    CHECK_THROWS_AS(parse_program("p(x) { if x > 0 then x <- 0 fi }"), ParseError);
}

TEST_CASE("quantifier bounds may not mention the bound variable") {
    CHECK_THROWS_WITH(parse_expr_text("forall-k / k <= k < n : true"),
                      Catch::Matchers::ContainsSubstring("bound variable"));
}

TEST_CASE("@pre must name a parameter") {
    CHECK_THROWS_WITH(parse_program("p(x) :! t@pre = 1 { local t <- 1 }"),
                      Catch::Matchers::ContainsSubstring("parameter"));
    CHECK_THROWS_WITH(parse_program("p(x) { local t <- 1 t <- t@pre }"),
                      Catch::Matchers::ContainsSubstring("parameter"));
}
