#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pest {

// Mathematical integers; program arithmetic never wraps. Expression
// templates are off so values compose cleanly with std::variant.
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                          boost::multiprecision::et_off>;

// ---------------------------------------------------------------------------
// Source locations
// ---------------------------------------------------------------------------

struct Span {
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;

    bool valid() const { return line > 0; }
    static Span join(const Span& a, const Span& b) {
        if (!a.valid()) return b;
        if (!b.valid()) return a;
        return Span{a.line, a.col, b.end_line, b.end_col};
    }
    std::string str() const;
};

inline std::string Span::str() const {
    if (!valid()) return "<generated>";
    return std::to_string(line) + ":" + std::to_string(col);
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Neg, Not };

enum class BinaryOp {
    Add, Sub, Mul, Div, Mod,
    Lt, Le, Gt, Ge, Eq, Ne,
    And, Or, Imp,
};

enum class QuantKind { Forall, Exists };

struct IntLit { Int value; };
struct BoolLit { bool value; };
struct Var { std::string name; };
struct VarAtPre { std::string name; };                       // x@pre
struct ArrayAccess { ExprPtr array; ExprPtr index; };        // A[i]
struct ArraySize { ExprPtr array; };                         // |A|
struct ArrayUpdate { ExprPtr array; ExprPtr index; ExprPtr value; };
struct Unary { UnaryOp op; ExprPtr arg; };
struct Binary { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };

// forall-k / lo <= k < hi : body   (and the exists- form)
struct BoundedQuant {
    QuantKind kind;
    std::string var;
    ExprPtr lo;
    ExprPtr hi;
    ExprPtr body;
};

// Unbounded existential closure. Never written in user source; produced by
// the inference and strengthening calculi and rendered as `exists vs (b)`.
struct UnboundedExists {
    std::vector<std::string> vars;
    ExprPtr body;
};

struct Expr {
    using Node = std::variant<IntLit, BoolLit, Var, VarAtPre, ArrayAccess,
                              ArraySize, ArrayUpdate, Unary, Binary,
                              BoundedQuant, UnboundedExists>;
    Node node;
    Span span;

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }
    template <class T>
    bool is() const { return std::holds_alternative<T>(node); }
};

// Free-function accessors; usable on dependent expressions inside generic
// lambdas where a member template would need the `template` keyword.
template <class T>
const T* as_node(const Expr& e) { return std::get_if<T>(&e.node); }
template <class T>
const T* as_node(const ExprPtr& e) { return e ? std::get_if<T>(&e->node) : nullptr; }

inline ExprPtr mk_expr(Expr::Node n, Span sp = {}) {
    return std::make_shared<Expr>(Expr{std::move(n), sp});
}

inline ExprPtr mk_int(Int v, Span sp = {}) { return mk_expr(IntLit{std::move(v)}, sp); }
inline ExprPtr mk_bool(bool v, Span sp = {}) { return mk_expr(BoolLit{v}, sp); }
inline ExprPtr mk_true(Span sp = {}) { return mk_bool(true, sp); }
inline ExprPtr mk_var(std::string n, Span sp = {}) { return mk_expr(Var{std::move(n)}, sp); }
inline ExprPtr mk_at_pre(std::string n, Span sp = {}) { return mk_expr(VarAtPre{std::move(n)}, sp); }
inline ExprPtr mk_index(ExprPtr a, ExprPtr i, Span sp = {}) {
    return mk_expr(ArrayAccess{std::move(a), std::move(i)}, sp);
}
inline ExprPtr mk_size(ExprPtr a, Span sp = {}) { return mk_expr(ArraySize{std::move(a)}, sp); }
inline ExprPtr mk_update(ExprPtr a, ExprPtr i, ExprPtr v, Span sp = {}) {
    return mk_expr(ArrayUpdate{std::move(a), std::move(i), std::move(v)}, sp);
}
inline ExprPtr mk_unary(UnaryOp op, ExprPtr e, Span sp = {}) {
    return mk_expr(Unary{op, std::move(e)}, sp);
}
inline ExprPtr mk_binary(BinaryOp op, ExprPtr l, ExprPtr r, Span sp = {}) {
    return mk_expr(Binary{op, std::move(l), std::move(r)}, sp);
}
inline ExprPtr mk_not(ExprPtr e, Span sp = {}) { return mk_unary(UnaryOp::Not, std::move(e), sp); }
inline ExprPtr mk_and(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::And, std::move(l), std::move(r), sp); }
inline ExprPtr mk_or(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Or, std::move(l), std::move(r), sp); }
inline ExprPtr mk_imp(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Imp, std::move(l), std::move(r), sp); }
inline ExprPtr mk_eq(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Eq, std::move(l), std::move(r), sp); }
inline ExprPtr mk_lt(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Lt, std::move(l), std::move(r), sp); }
inline ExprPtr mk_le(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Le, std::move(l), std::move(r), sp); }
inline ExprPtr mk_add(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Add, std::move(l), std::move(r), sp); }
inline ExprPtr mk_sub(ExprPtr l, ExprPtr r, Span sp = {}) { return mk_binary(BinaryOp::Sub, std::move(l), std::move(r), sp); }
inline ExprPtr mk_quant(QuantKind k, std::string v, ExprPtr lo, ExprPtr hi, ExprPtr body, Span sp = {}) {
    return mk_expr(BoundedQuant{k, std::move(v), std::move(lo), std::move(hi), std::move(body)}, sp);
}

// Conjunction of a clause list; empty list is `true`.
inline ExprPtr mk_conj(const std::vector<ExprPtr>& es) {
    if (es.empty()) return mk_true();
    ExprPtr acc = es.front();
    for (size_t i = 1; i < es.size(); ++i) acc = mk_and(acc, es[i]);
    return acc;
}

// ---------------------------------------------------------------------------
// Structural predicates
// ---------------------------------------------------------------------------

// Equality up to source spans.
inline bool struct_eq(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, IntLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Var>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, VarAtPre>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                return struct_eq(*x.array, *y.array) && struct_eq(*x.index, *y.index);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                return struct_eq(*x.array, *y.array);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                return struct_eq(*x.array, *y.array) && struct_eq(*x.index, *y.index) &&
                       struct_eq(*x.value, *y.value);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return x.op == y.op && struct_eq(*x.arg, *y.arg);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && struct_eq(*x.lhs, *y.lhs) && struct_eq(*x.rhs, *y.rhs);
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                return x.kind == y.kind && x.var == y.var && struct_eq(*x.lo, *y.lo) &&
                       struct_eq(*x.hi, *y.hi) && struct_eq(*x.body, *y.body);
            } else {
                const auto& u = static_cast<const UnboundedExists&>(x);
                const auto& v = std::get<UnboundedExists>(b.node);
                return u.vars == v.vars && struct_eq(*u.body, *v.body);
            }
        },
        a.node);
}

inline bool struct_eq(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return struct_eq(*a, *b);
}

inline bool is_true_lit(const Expr& e) {
    const auto* b = e.as<BoolLit>();
    return b && b->value;
}
inline bool is_false_lit(const Expr& e) {
    const auto* b = e.as<BoolLit>();
    return b && !b->value;
}

// Free variables of an expression. `x@pre` occurrences are reported under
// the key "x@pre" so pre-state names never collide with program variables.
inline std::string at_pre_key(const std::string& name) { return name + "@pre"; }

inline void free_vars_into(const Expr& e, const std::set<std::string>& bound,
                           std::set<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Var>) {
                if (!bound.count(x.name)) out.insert(x.name);
            } else if constexpr (std::is_same_v<T, VarAtPre>) {
                out.insert(at_pre_key(x.name));
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                free_vars_into(*x.array, bound, out);
                free_vars_into(*x.index, bound, out);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                free_vars_into(*x.array, bound, out);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                free_vars_into(*x.array, bound, out);
                free_vars_into(*x.index, bound, out);
                free_vars_into(*x.value, bound, out);
            } else if constexpr (std::is_same_v<T, Unary>) {
                free_vars_into(*x.arg, bound, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                free_vars_into(*x.lhs, bound, out);
                free_vars_into(*x.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                free_vars_into(*x.lo, bound, out);
                free_vars_into(*x.hi, bound, out);
                auto inner = bound;
                inner.insert(x.var);
                free_vars_into(*x.body, inner, out);
            } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                auto inner = bound;
                for (const auto& v : x.vars) inner.insert(v);
                free_vars_into(*x.body, inner, out);
            }
        },
        e.node);
}

inline std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    free_vars_into(e, {}, out);
    return out;
}
inline std::set<std::string> free_vars(const ExprPtr& e) { return free_vars(*e); }

inline bool contains_unbounded_exists(const Expr& e) {
    bool found = false;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnboundedExists>) {
                found = true;
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                found = contains_unbounded_exists(*x.array) || contains_unbounded_exists(*x.index);
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                found = contains_unbounded_exists(*x.array);
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                found = contains_unbounded_exists(*x.array) || contains_unbounded_exists(*x.index) ||
                        contains_unbounded_exists(*x.value);
            } else if constexpr (std::is_same_v<T, Unary>) {
                found = contains_unbounded_exists(*x.arg);
            } else if constexpr (std::is_same_v<T, Binary>) {
                found = contains_unbounded_exists(*x.lhs) || contains_unbounded_exists(*x.rhs);
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                found = contains_unbounded_exists(*x.lo) || contains_unbounded_exists(*x.hi) ||
                        contains_unbounded_exists(*x.body);
            }
        },
        e.node);
    return found;
}

// ---------------------------------------------------------------------------
// Sentences
// ---------------------------------------------------------------------------

struct Sentence;
using SentencePtr = std::shared_ptr<const Sentence>;

enum class Origin { Declared, Inferred };

// One annotation clause (`:?`, `:!`, `:?!`), tagged with whether the user
// wrote it or a calculus synthesized it.
struct AnnClause {
    ExprPtr pred;
    Origin origin = Origin::Declared;
};

struct SAssign { std::string target; ExprPtr value; };
struct SLocal { std::string name; ExprPtr init; };
struct SIf { ExprPtr guard; SentencePtr then_branch; SentencePtr else_branch; };
struct SWhile {
    ExprPtr guard;
    std::vector<AnnClause> invariants;   // at least one
    ExprPtr variant;                     // exactly one
    SentencePtr body;
    bool cbc = false;                    // invariants correct by construction (map expansion)
};
struct SCall { std::string proc; std::vector<std::string> actuals; };
struct SFor { std::string index; ExprPtr lo; ExprPtr hi; SentencePtr body; };
struct SMap { SentencePtr body; std::string array; std::string index; };
struct SSeq { SentencePtr first; SentencePtr second; };
struct SSkip {};

struct Sentence {
    using Node = std::variant<SAssign, SLocal, SIf, SWhile, SCall, SFor, SMap, SSeq, SSkip>;
    Node node;
    Span span;

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }
    template <class T>
    bool is() const { return std::holds_alternative<T>(node); }
};

inline SentencePtr mk_sentence(Sentence::Node n, Span sp = {}) {
    return std::make_shared<Sentence>(Sentence{std::move(n), sp});
}
inline SentencePtr mk_skip(Span sp = {}) { return mk_sentence(SSkip{}, sp); }
inline SentencePtr mk_assign(std::string v, ExprPtr e, Span sp = {}) {
    return mk_sentence(SAssign{std::move(v), std::move(e)}, sp);
}
inline SentencePtr mk_local(std::string v, ExprPtr e, Span sp = {}) {
    return mk_sentence(SLocal{std::move(v), std::move(e)}, sp);
}
inline SentencePtr mk_seq(SentencePtr a, SentencePtr b, Span sp = {}) {
    return mk_sentence(SSeq{std::move(a), std::move(b)}, sp);
}

// Right-folded sequence, the shape the parser produces.
inline SentencePtr seq_of(std::vector<SentencePtr> ss, Span sp = {}) {
    if (ss.empty()) return mk_skip(sp);
    SentencePtr acc = ss.back();
    for (size_t i = ss.size() - 1; i-- > 0;) acc = mk_seq(ss[i], acc, sp);
    return acc;
}

inline bool contains_for_or_map(const Sentence& s) {
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SIf>) {
                return contains_for_or_map(*x.then_branch) || contains_for_or_map(*x.else_branch);
            } else if constexpr (std::is_same_v<T, SWhile>) {
                return contains_for_or_map(*x.body);
            } else if constexpr (std::is_same_v<T, SSeq>) {
                return contains_for_or_map(*x.first) || contains_for_or_map(*x.second);
            } else if constexpr (std::is_same_v<T, SFor> || std::is_same_v<T, SMap>) {
                return true;
            } else {
                return false;
            }
        },
        s.node);
}

// ---------------------------------------------------------------------------
// Procedures and programs
// ---------------------------------------------------------------------------

struct Procedure {
    std::string name;
    std::vector<std::string> params;
    std::vector<AnnClause> pre;    // `:?` clauses, conjoined
    std::vector<AnnClause> post;   // `:!` clauses, conjoined
    SentencePtr body;
    Span span;

    ExprPtr pre_conj() const {
        std::vector<ExprPtr> es;
        for (const auto& c : pre) es.push_back(c.pred);
        return mk_conj(es);
    }
    ExprPtr post_conj() const {
        std::vector<ExprPtr> es;
        for (const auto& c : post) es.push_back(c.pred);
        return mk_conj(es);
    }
};

struct Program {
    std::vector<Procedure> procedures;

    const Procedure* find(const std::string& name) const {
        for (const auto& p : procedures)
            if (p.name == name) return &p;
        return nullptr;
    }
};

}  // namespace pest
