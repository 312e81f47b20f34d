#pragma once

#include "pest/ast.hpp"
#include "pest/lexer.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace pest {

struct ParseOptions {
    // Accept the internal `exists v1,...,vn (b)` rendering of unbounded
    // existentials. User source never contains it.
    bool internal = false;
};

class Parser {
public:
    Parser(std::string_view src, ParseOptions opts = {})
        : tokens_(Lexer(src).run()), opts_(opts) {}

    Program parse_program() {
        Program prog;
        while (!at(Tok::End)) prog.procedures.push_back(parse_procedure());
        if (prog.procedures.empty())
            throw ParseError(cur().span, "empty program", {tok_name(Tok::Ident)});
        validate(prog);
        return prog;
    }

    // Entry point used by tests and the internal-syntax round trip.
    ExprPtr parse_expression() {
        ExprPtr e = parse_expr();
        expect(Tok::End);
        return e;
    }

private:
    std::vector<Token> tokens_;
    size_t idx_ = 0;
    ParseOptions opts_;

    const Token& cur() const { return tokens_[idx_]; }
    const Token& peek(size_t k = 1) const {
        return tokens_[std::min(idx_ + k, tokens_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }

    Token take() { return tokens_[idx_ == tokens_.size() - 1 ? idx_ : idx_++]; }

    Token expect(Tok k) {
        if (!at(k))
            throw ParseError(cur().span, "unexpected " + describe(cur()), {tok_name(k)});
        return take();
    }

    bool accept(Tok k) {
        if (!at(k)) return false;
        take();
        return true;
    }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::Ident || t.kind == Tok::IntLit) return "'" + t.text + "'";
        return tok_name(t.kind);
    }

    // -- procedures -----------------------------------------------------

    Procedure parse_procedure() {
        Procedure p;
        Token name = expect(Tok::Ident);
        p.name = name.text;
        p.span = name.span;
        expect(Tok::LParen);
        if (!at(Tok::RParen)) {
            p.params.push_back(expect(Tok::Ident).text);
            while (accept(Tok::Comma)) p.params.push_back(expect(Tok::Ident).text);
        }
        expect(Tok::RParen);
        for (;;) {
            if (accept(Tok::AnnPre)) {
                p.pre.push_back({parse_expr(), Origin::Declared});
            } else if (accept(Tok::AnnPost)) {
                p.post.push_back({parse_expr(), Origin::Declared});
            } else {
                break;
            }
        }
        expect(Tok::LBrace);
        p.body = parse_sentences(Tok::RBrace);
        Token close = expect(Tok::RBrace);
        p.span = Span::join(name.span, close.span);
        return p;
    }

    // -- sentences ------------------------------------------------------

    SentencePtr parse_sentences(Tok stop) {
        std::vector<SentencePtr> ss;
        while (!at(stop) && !at(Tok::KwElse) && !at(Tok::KwFi) && !at(Tok::KwOd) &&
               !at(Tok::KwIn) && !at(Tok::End)) {
            ss.push_back(parse_sentence());
        }
        if (ss.empty()) return mk_skip(cur().span);
        return seq_of(std::move(ss));
    }

    SentencePtr parse_sentence() {
        const Token& t = cur();
        switch (t.kind) {
            case Tok::KwSkip: {
                Token k = take();
                return mk_skip(k.span);
            }
            case Tok::KwLocal: {
                Token k = take();
                Token name = expect(Tok::Ident);
                expect(Tok::Arrow);
                ExprPtr init = parse_expr();
                return mk_local(name.text, init, Span::join(k.span, init->span));
            }
            case Tok::Ident: {
                Token name = take();
                if (accept(Tok::LBracket)) {
                    // A[i] <- e is shorthand for A <- update A on i with e.
                    ExprPtr idx = parse_expr();
                    expect(Tok::RBracket);
                    expect(Tok::Arrow);
                    ExprPtr val = parse_expr();
                    Span sp = Span::join(name.span, val->span);
                    return mk_assign(name.text,
                                     mk_update(mk_var(name.text, name.span), idx, val, sp), sp);
                }
                expect(Tok::Arrow);
                ExprPtr val = parse_expr();
                return mk_assign(name.text, val, Span::join(name.span, val->span));
            }
            case Tok::KwIf: {
                Token k = take();
                ExprPtr guard = parse_expr();
                expect(Tok::KwThen);
                SentencePtr then_b = parse_sentences(Tok::KwElse);
                expect(Tok::KwElse);
                SentencePtr else_b = parse_sentences(Tok::KwFi);
                Token fi = expect(Tok::KwFi);
                return mk_sentence(SIf{guard, then_b, else_b}, Span::join(k.span, fi.span));
            }
            case Tok::KwWhile: {
                Token k = take();
                SWhile w;
                w.guard = parse_expr();
                bool have_variant = false;
                while (at(Tok::AnnInv) || at(Tok::AnnVar)) {
                    if (accept(Tok::AnnInv)) {
                        w.invariants.push_back({parse_expr(), Origin::Declared});
                    } else {
                        Token v = take();
                        if (have_variant)
                            throw ParseError(v.span, "a loop takes exactly one variant");
                        w.variant = parse_expr();
                        have_variant = true;
                    }
                }
                if (w.invariants.empty())
                    throw ParseError(cur().span, "a loop needs at least one invariant",
                                     {tok_name(Tok::AnnInv)});
                if (!have_variant)
                    throw ParseError(cur().span, "a loop needs a variant",
                                     {tok_name(Tok::AnnVar)});
                expect(Tok::KwDo);
                w.body = parse_sentences(Tok::KwOd);
                Token od = expect(Tok::KwOd);
                return mk_sentence(std::move(w), Span::join(k.span, od.span));
            }
            case Tok::KwCall: {
                Token k = take();
                Token callee = expect(Tok::Ident);
                expect(Tok::LParen);
                std::vector<std::string> actuals;
                if (!at(Tok::RParen)) {
                    actuals.push_back(expect(Tok::Ident).text);
                    while (accept(Tok::Comma)) actuals.push_back(expect(Tok::Ident).text);
                }
                Token close = expect(Tok::RParen);
                return mk_sentence(SCall{callee.text, std::move(actuals)},
                                   Span::join(k.span, close.span));
            }
            case Tok::KwFor: {
                Token k = take();
                Token index = expect(Tok::Ident);
                expect(Tok::KwFrom);
                ExprPtr lo = parse_expr();
                expect(Tok::KwTo);
                ExprPtr hi = parse_expr();
                expect(Tok::KwDo);
                SentencePtr body = parse_sentences(Tok::KwOd);
                Token od = expect(Tok::KwOd);
                return mk_sentence(SFor{index.text, lo, hi, body}, Span::join(k.span, od.span));
            }
            case Tok::KwMap: {
                Token k = take();
                SentencePtr body = parse_sentences(Tok::KwIn);
                expect(Tok::KwIn);
                Token arr = expect(Tok::Ident);
                expect(Tok::LBracket);
                expect(Tok::Slash2Dots);
                Token index = expect(Tok::Ident);
                expect(Tok::Slash2Dots);
                Token close = expect(Tok::RBracket);
                return mk_sentence(SMap{body, arr.text, index.text},
                                   Span::join(k.span, close.span));
            }
            default:
                throw ParseError(t.span, "unexpected " + describe(t) + ", expected a sentence",
                                 {tok_name(Tok::Ident), tok_name(Tok::KwLocal), tok_name(Tok::KwIf),
                                  tok_name(Tok::KwWhile), tok_name(Tok::KwCall), tok_name(Tok::KwFor),
                                  tok_name(Tok::KwMap), tok_name(Tok::KwSkip)});
        }
    }

    // -- expressions ----------------------------------------------------
    //
    // Precedence, loosest first: quantifiers (greedy body), `=>` (right),
    // `||`, `&&`, `!`, comparisons (chained into conjunctions), `+ -`,
    // `* / %`, unary minus, postfix `[ ]` / `@pre`.

    ExprPtr parse_expr() { return parse_implication(); }

    bool at_quantifier() const {
        if (at(Tok::ForallDash) || at(Tok::ExistsDash)) return true;
        return opts_.internal && at(Tok::KwExists);
    }

    ExprPtr parse_quantifier() {
        if (at(Tok::KwExists)) {
            Token k = take();
            std::vector<std::string> vars;
            vars.push_back(expect(Tok::Ident).text);
            while (accept(Tok::Comma)) vars.push_back(expect(Tok::Ident).text);
            expect(Tok::LParen);
            ExprPtr body = parse_expr();
            Token close = expect(Tok::RParen);
            return mk_expr(UnboundedExists{std::move(vars), body}, Span::join(k.span, close.span));
        }
        Token k = take();  // forall- / exists-
        QuantKind kind = k.kind == Tok::ForallDash ? QuantKind::Forall : QuantKind::Exists;
        Token var = expect(Tok::Ident);
        expect(Tok::Slash);
        ExprPtr lo = parse_additive();
        expect(Tok::Le);
        Token mid = expect(Tok::Ident);
        if (mid.text != var.text)
            throw ParseError(mid.span, "quantifier range must name the bound variable '" +
                                           var.text + "'");
        expect(Tok::Lt);
        ExprPtr hi = parse_additive();
        if (free_vars(lo).count(var.text) || free_vars(hi).count(var.text))
            throw ParseError(var.span, "quantifier bounds may not mention the bound variable '" +
                                           var.text + "'");
        expect(Tok::Colon);
        ExprPtr body = parse_expr();
        return mk_quant(kind, var.text, lo, hi, body, Span::join(k.span, body->span));
    }

    ExprPtr parse_implication() {
        if (at_quantifier()) return parse_quantifier();
        ExprPtr lhs = parse_or();
        if (accept(Tok::Imp)) {
            ExprPtr rhs = parse_implication();  // right-associative
            return mk_binary(BinaryOp::Imp, lhs, rhs, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (accept(Tok::OrOr)) {
            ExprPtr rhs = parse_and();
            lhs = mk_binary(BinaryOp::Or, lhs, rhs, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (accept(Tok::AndAnd)) {
            ExprPtr rhs = parse_not();
            lhs = mk_binary(BinaryOp::And, lhs, rhs, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at_quantifier()) return parse_quantifier();
        if (at(Tok::Bang)) {
            Token k = take();
            ExprPtr arg = parse_not();
            return mk_not(arg, Span::join(k.span, arg->span));
        }
        return parse_comparison();
    }

    static bool cmp_op(Tok t, BinaryOp& op) {
        switch (t) {
            case Tok::Lt: op = BinaryOp::Lt; return true;
            case Tok::Le: op = BinaryOp::Le; return true;
            case Tok::Gt: op = BinaryOp::Gt; return true;
            case Tok::Ge: op = BinaryOp::Ge; return true;
            case Tok::Eq: op = BinaryOp::Eq; return true;
            case Tok::Ne: op = BinaryOp::Ne; return true;
            default: return false;
        }
    }

    // `1 <= i <= |A|` chains into `1 <= i && i <= |A|`.
    ExprPtr parse_comparison() {
        ExprPtr first = parse_additive();
        BinaryOp op;
        if (!cmp_op(cur().kind, op)) return first;
        std::vector<ExprPtr> operands{first};
        std::vector<BinaryOp> ops;
        while (cmp_op(cur().kind, op)) {
            take();
            ops.push_back(op);
            operands.push_back(parse_additive());
        }
        ExprPtr acc;
        for (size_t i = 0; i < ops.size(); ++i) {
            Span sp = Span::join(operands[i]->span, operands[i + 1]->span);
            ExprPtr link = mk_binary(ops[i], operands[i], operands[i + 1], sp);
            acc = acc ? mk_binary(BinaryOp::And, acc, link, Span::join(acc->span, sp)) : link;
        }
        return acc;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        for (;;) {
            BinaryOp op;
            if (at(Tok::Plus)) op = BinaryOp::Add;
            else if (at(Tok::Minus)) op = BinaryOp::Sub;
            else break;
            take();
            ExprPtr rhs = parse_multiplicative();
            lhs = mk_binary(op, lhs, rhs, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            BinaryOp op;
            if (at(Tok::Star)) op = BinaryOp::Mul;
            else if (at(Tok::Slash)) op = BinaryOp::Div;
            else if (at(Tok::Percent)) op = BinaryOp::Mod;
            else break;
            take();
            ExprPtr rhs = parse_unary();
            lhs = mk_binary(op, lhs, rhs, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            Token k = take();
            ExprPtr arg = parse_unary();
            return mk_unary(UnaryOp::Neg, arg, Span::join(k.span, arg->span));
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (at(Tok::AtPre)) {
                Token k = take();
                const auto* v = e->as<Var>();
                if (!v)
                    throw ParseError(k.span, "'@pre' applies to a variable");
                e = mk_at_pre(v->name, Span::join(e->span, k.span));
            } else if (accept(Tok::LBracket)) {
                ExprPtr idx = parse_expr();
                Token close = expect(Tok::RBracket);
                e = mk_index(e, idx, Span::join(e->span, close.span));
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_primary() {
        const Token& t = cur();
        switch (t.kind) {
            case Tok::IntLit: {
                Token k = take();
                return mk_int(Int(k.text), k.span);
            }
            case Tok::KwTrue: {
                Token k = take();
                return mk_bool(true, k.span);
            }
            case Tok::KwFalse: {
                Token k = take();
                return mk_bool(false, k.span);
            }
            case Tok::Ident: {
                Token k = take();
                return mk_var(k.text, k.span);
            }
            case Tok::LParen: {
                take();
                ExprPtr e = parse_expr();
                expect(Tok::RParen);
                return e;
            }
            case Tok::Bar: {
                Token k = take();
                ExprPtr arr = parse_postfix();
                Token close = expect(Tok::Bar);
                return mk_size(arr, Span::join(k.span, close.span));
            }
            case Tok::KwUpdate: {
                Token k = take();
                ExprPtr arr = parse_postfix();
                expect(Tok::KwOn);
                ExprPtr idx = parse_additive();
                expect(Tok::KwWith);
                ExprPtr val = parse_additive();
                return mk_update(arr, idx, val, Span::join(k.span, val->span));
            }
            case Tok::ForallDash:
            case Tok::ExistsDash:
                return parse_quantifier();
            case Tok::KwExists:
                if (opts_.internal) return parse_quantifier();
                throw ParseError(t.span,
                                 "unbounded 'exists' is internal syntax (enable --internal)");
            default:
                throw ParseError(t.span, "unexpected " + describe(t) + ", expected an expression");
        }
    }

    // -- static validation ----------------------------------------------

    struct ProcInfo {
        size_t arity;
    };

    void validate(const Program& prog) {
        std::vector<std::pair<std::string, ProcInfo>> seen;
        for (const auto& p : prog.procedures) {
            for (const auto& [n, _] : seen)
                if (n == p.name)
                    throw ParseError(p.span, "duplicate procedure name '" + p.name + "'");
            std::set<std::string> params(p.params.begin(), p.params.end());
            if (params.size() != p.params.size())
                throw ParseError(p.span, "procedure '" + p.name + "' has repeated parameters");
            Ctx ctx{&seen, &params, p.name};
            for (const auto& c : p.pre) check_expr(*c.pred, params, ctx, /*allow_at_pre=*/true);
            for (const auto& c : p.post) check_expr(*c.pred, params, ctx, true);
            std::set<std::string> scope = params;
            check_sentence(*p.body, scope, ctx);
            seen.emplace_back(p.name, ProcInfo{p.params.size()});
        }
    }

    struct Ctx {
        const std::vector<std::pair<std::string, ProcInfo>>* earlier;
        const std::set<std::string>* params;
        std::string proc;
    };

    void check_expr(const Expr& e, const std::set<std::string>& scope, const Ctx& ctx,
                    bool allow_at_pre) const {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Var>) {
                    if (!scope.count(x.name))
                        throw ParseError(e.span, "unknown variable '" + x.name + "'");
                } else if constexpr (std::is_same_v<T, VarAtPre>) {
                    if (!allow_at_pre)
                        throw ParseError(e.span, "'@pre' is not allowed here");
                    if (!ctx.params->count(x.name))
                        throw ParseError(e.span, "'" + x.name + "@pre' must name a parameter of '" +
                                                     ctx.proc + "'");
                } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                    check_expr(*x.array, scope, ctx, allow_at_pre);
                    check_expr(*x.index, scope, ctx, allow_at_pre);
                } else if constexpr (std::is_same_v<T, ArraySize>) {
                    check_expr(*x.array, scope, ctx, allow_at_pre);
                } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                    check_expr(*x.array, scope, ctx, allow_at_pre);
                    check_expr(*x.index, scope, ctx, allow_at_pre);
                    check_expr(*x.value, scope, ctx, allow_at_pre);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    check_expr(*x.arg, scope, ctx, allow_at_pre);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    check_expr(*x.lhs, scope, ctx, allow_at_pre);
                    check_expr(*x.rhs, scope, ctx, allow_at_pre);
                } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                    check_expr(*x.lo, scope, ctx, allow_at_pre);
                    check_expr(*x.hi, scope, ctx, allow_at_pre);
                    auto inner = scope;
                    inner.insert(x.var);  // bound variable shadows
                    check_expr(*x.body, inner, ctx, allow_at_pre);
                } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                    auto inner = scope;
                    for (const auto& v : x.vars) inner.insert(v);
                    check_expr(*x.body, inner, ctx, allow_at_pre);
                }
            },
            e.node);
    }

    void check_sentence(const Sentence& s, std::set<std::string>& scope, const Ctx& ctx) const {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, SAssign>) {
                    if (!scope.count(x.target))
                        throw ParseError(s.span, "unknown variable '" + x.target + "'");
                    check_expr(*x.value, scope, ctx, true);
                } else if constexpr (std::is_same_v<T, SLocal>) {
                    check_expr(*x.init, scope, ctx, true);
                    if (scope.count(x.name))
                        throw ParseError(s.span, "'" + x.name + "' shadows an existing variable");
                    scope.insert(x.name);
                } else if constexpr (std::is_same_v<T, SIf>) {
                    check_expr(*x.guard, scope, ctx, true);
                    auto then_scope = scope;
                    check_sentence(*x.then_branch, then_scope, ctx);
                    auto else_scope = scope;
                    check_sentence(*x.else_branch, else_scope, ctx);
                } else if constexpr (std::is_same_v<T, SWhile>) {
                    check_expr(*x.guard, scope, ctx, true);
                    for (const auto& c : x.invariants) check_expr(*c.pred, scope, ctx, true);
                    check_expr(*x.variant, scope, ctx, true);
                    auto body_scope = scope;
                    check_sentence(*x.body, body_scope, ctx);
                } else if constexpr (std::is_same_v<T, SCall>) {
                    const ProcInfo* callee = nullptr;
                    for (const auto& [n, info] : *ctx.earlier)
                        if (n == x.proc) callee = &info;
                    if (!callee) {
                        std::string why = x.proc == ctx.proc
                                              ? "recursive call to '" + x.proc + "'"
                                              : "call to undefined or later-defined procedure '" +
                                                    x.proc + "'";
                        throw ParseError(s.span, why);
                    }
                    if (callee->arity != x.actuals.size())
                        throw ParseError(s.span, "'" + x.proc + "' takes " +
                                                     std::to_string(callee->arity) + " arguments");
                    std::set<std::string> distinct;
                    for (const auto& a : x.actuals) {
                        if (!scope.count(a))
                            throw ParseError(s.span, "unknown variable '" + a + "'");
                        if (!distinct.insert(a).second)
                            throw ParseError(s.span, "call arguments must be distinct ('" + a + "')");
                    }
                } else if constexpr (std::is_same_v<T, SFor>) {
                    check_expr(*x.lo, scope, ctx, true);
                    check_expr(*x.hi, scope, ctx, true);
                    if (scope.count(x.index))
                        throw ParseError(s.span, "'" + x.index + "' shadows an existing variable");
                    auto body_scope = scope;
                    body_scope.insert(x.index);
                    check_sentence(*x.body, body_scope, ctx);
                } else if constexpr (std::is_same_v<T, SMap>) {
                    if (!scope.count(x.array))
                        throw ParseError(s.span, "unknown variable '" + x.array + "'");
                    if (scope.count(x.index))
                        throw ParseError(s.span, "'" + x.index + "' shadows an existing variable");
                    auto body_scope = scope;
                    body_scope.insert(x.index);
                    check_sentence(*x.body, body_scope, ctx);
                } else if constexpr (std::is_same_v<T, SSeq>) {
                    check_sentence(*x.first, scope, ctx);
                    check_sentence(*x.second, scope, ctx);
                }
            },
            s.node);
    }
};

inline Program parse_program(std::string_view source, ParseOptions opts = {}) {
    return Parser(source, opts).parse_program();
}

inline ExprPtr parse_expr_text(std::string_view source, ParseOptions opts = {}) {
    return Parser(source, opts).parse_expression();
}

}  // namespace pest
