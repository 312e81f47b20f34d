#pragma once

#include "pest/ast.hpp"
#include "pest/logic.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace pest {

// ---------------------------------------------------------------------------
// Runtime values and states
// ---------------------------------------------------------------------------

using Arr = std::vector<Int>;
using Value = std::variant<Int, bool, Arr>;

inline bool value_eq(const Value& a, const Value& b) { return a == b; }

inline std::string value_to_string(const Value& v) {
    std::ostringstream os;
    if (const auto* i = std::get_if<Int>(&v)) {
        os << *i;
    } else if (const auto* b = std::get_if<bool>(&v)) {
        os << (*b ? "true" : "false");
    } else {
        const auto& arr = std::get<Arr>(v);
        os << "[";
        for (size_t k = 0; k < arr.size(); ++k) {
            if (k) os << ", ";
            os << arr[k];
        }
        os << "]";
    }
    return os.str();
}

// Finite map from variable names (including `x@pre` entries) to values.
using State = std::map<std::string, Value>;

inline std::string state_to_string(const State& s) {
    std::string out;
    for (const auto& [k, v] : s) {
        if (!out.empty()) out += ", ";
        out += k + " = " + value_to_string(v);
    }
    return "{" + out + "}";
}

// Why an evaluation was undefined.
struct Undef {
    Span span;
    std::string reason;
};

// ---------------------------------------------------------------------------
// Expression evaluation
// ---------------------------------------------------------------------------
//
// Boolean connectives and bounded quantifiers evaluate left to right with
// short-circuiting; division truncates toward zero and `%` takes the sign of
// the dividend. Out-of-range indexing and division by zero are undefined.

namespace detail {

inline void set_undef(Undef* why, Span sp, const std::string& reason) {
    if (why && why->reason.empty()) *why = Undef{sp, reason};
}

template <class Env, class ExistsFn>
std::optional<Value> eval_impl(const Expr& e, const Env& env,
                               std::vector<std::pair<std::string, Value>>& shadow, Undef* why,
                               const ExistsFn& on_exists) {
    using R = std::optional<Value>;
    return std::visit(
        [&](const auto& x) -> R {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return Value{x.value};
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return Value{x.value};
            } else if constexpr (std::is_same_v<T, Var>) {
                for (auto it = shadow.rbegin(); it != shadow.rend(); ++it)
                    if (it->first == x.name) return it->second;
                if (const Value* v = env.find(x.name)) return *v;
                set_undef(why, e.span, "variable '" + x.name + "' has no value");
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, VarAtPre>) {
                if (const Value* v = env.find(at_pre_key(x.name))) return *v;
                set_undef(why, e.span, "'" + x.name + "@pre' has no value");
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                R a = eval_impl(*x.array, env, shadow, why, on_exists);
                if (!a) return std::nullopt;
                R i = eval_impl(*x.index, env, shadow, why, on_exists);
                if (!i) return std::nullopt;
                const Arr& arr = std::get<Arr>(*a);
                const Int& idx = std::get<Int>(*i);
                if (idx < 0 || idx >= Int(arr.size())) {
                    set_undef(why, e.span, "index " + idx.str() + " out of range for array of length " +
                                               std::to_string(arr.size()));
                    return std::nullopt;
                }
                return Value{arr[static_cast<size_t>(idx)]};
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                R a = eval_impl(*x.array, env, shadow, why, on_exists);
                if (!a) return std::nullopt;
                return Value{Int(std::get<Arr>(*a).size())};
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                R a = eval_impl(*x.array, env, shadow, why, on_exists);
                if (!a) return std::nullopt;
                R i = eval_impl(*x.index, env, shadow, why, on_exists);
                if (!i) return std::nullopt;
                R v = eval_impl(*x.value, env, shadow, why, on_exists);
                if (!v) return std::nullopt;
                Arr arr = std::get<Arr>(std::move(*a));
                const Int& idx = std::get<Int>(*i);
                if (idx < 0 || idx >= Int(arr.size())) {
                    set_undef(why, e.span, "update index " + idx.str() + " out of range");
                    return std::nullopt;
                }
                arr[static_cast<size_t>(idx)] = std::get<Int>(std::move(*v));
                return Value{std::move(arr)};
            } else if constexpr (std::is_same_v<T, Unary>) {
                R a = eval_impl(*x.arg, env, shadow, why, on_exists);
                if (!a) return std::nullopt;
                if (x.op == UnaryOp::Neg) return Value{-std::get<Int>(*a)};
                return Value{!std::get<bool>(*a)};
            } else if constexpr (std::is_same_v<T, Binary>) {
                // short-circuit forms first
                if (x.op == BinaryOp::And || x.op == BinaryOp::Or || x.op == BinaryOp::Imp) {
                    R l = eval_impl(*x.lhs, env, shadow, why, on_exists);
                    if (!l) return std::nullopt;
                    bool lv = std::get<bool>(*l);
                    if (x.op == BinaryOp::And && !lv) return Value{false};
                    if (x.op == BinaryOp::Or && lv) return Value{true};
                    if (x.op == BinaryOp::Imp && !lv) return Value{true};
                    R r = eval_impl(*x.rhs, env, shadow, why, on_exists);
                    if (!r) return std::nullopt;
                    return Value{std::get<bool>(*r)};
                }
                R l = eval_impl(*x.lhs, env, shadow, why, on_exists);
                if (!l) return std::nullopt;
                R r = eval_impl(*x.rhs, env, shadow, why, on_exists);
                if (!r) return std::nullopt;
                switch (x.op) {
                    case BinaryOp::Add: return Value{std::get<Int>(*l) + std::get<Int>(*r)};
                    case BinaryOp::Sub: return Value{std::get<Int>(*l) - std::get<Int>(*r)};
                    case BinaryOp::Mul: return Value{std::get<Int>(*l) * std::get<Int>(*r)};
                    case BinaryOp::Div:
                    case BinaryOp::Mod: {
                        const Int& d = std::get<Int>(*r);
                        if (d == 0) {
                            set_undef(why, e.span,
                                      x.op == BinaryOp::Div ? "division by zero" : "modulo by zero");
                            return std::nullopt;
                        }
                        return Value{x.op == BinaryOp::Div ? std::get<Int>(*l) / d
                                                           : std::get<Int>(*l) % d};
                    }
                    case BinaryOp::Lt: return Value{std::get<Int>(*l) < std::get<Int>(*r)};
                    case BinaryOp::Le: return Value{std::get<Int>(*l) <= std::get<Int>(*r)};
                    case BinaryOp::Gt: return Value{std::get<Int>(*l) > std::get<Int>(*r)};
                    case BinaryOp::Ge: return Value{std::get<Int>(*l) >= std::get<Int>(*r)};
                    case BinaryOp::Eq: return Value{value_eq(*l, *r)};
                    case BinaryOp::Ne: return Value{!value_eq(*l, *r)};
                    default: return std::nullopt;
                }
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                R lo = eval_impl(*x.lo, env, shadow, why, on_exists);
                if (!lo) return std::nullopt;
                R hi = eval_impl(*x.hi, env, shadow, why, on_exists);
                if (!hi) return std::nullopt;
                bool is_forall = x.kind == QuantKind::Forall;
                shadow.emplace_back(x.var, Value{Int(0)});
                for (Int k = std::get<Int>(*lo); k < std::get<Int>(*hi); ++k) {
                    shadow.back().second = Value{k};
                    R b = eval_impl(*x.body, env, shadow, why, on_exists);
                    if (!b) {
                        shadow.pop_back();
                        return std::nullopt;
                    }
                    bool bv = std::get<bool>(*b);
                    if (is_forall && !bv) {
                        shadow.pop_back();
                        return Value{false};
                    }
                    if (!is_forall && bv) {
                        shadow.pop_back();
                        return Value{true};
                    }
                }
                shadow.pop_back();
                return Value{is_forall};
            } else {
                const auto& u = static_cast<const UnboundedExists&>(x);
                return on_exists(u, e.span, env, shadow, why);
            }
        },
        e.node);
}

struct StateEnv {
    const State& state;
    const Value* find(const std::string& name) const {
        auto it = state.find(name);
        return it == state.end() ? nullptr : &it->second;
    }
};

}  // namespace detail

// Evaluate an UnboundedExists-free expression in a state. Undefinedness is
// reported through `why` (first failure wins).
inline std::optional<Value> eval_expr(const State& sigma, const Expr& e, Undef* why = nullptr) {
    std::vector<std::pair<std::string, Value>> shadow;
    auto reject = [](const UnboundedExists&, Span sp, const auto&, auto&,
                     Undef* w) -> std::optional<Value> {
        detail::set_undef(w, sp, "unbounded quantifier is not executable");
        return std::nullopt;
    };
    return detail::eval_impl(e, detail::StateEnv{sigma}, shadow, why, reject);
}

// ---------------------------------------------------------------------------
// Sentence execution
// ---------------------------------------------------------------------------

enum class StuckKind {
    PreconditionFailed,
    PostconditionFailed,
    InvariantFailed,
    VariantNotPositive,
    VariantNotDecreased,
    UndefinedExpression,
    FuelExhausted,
};

inline const char* stuck_kind_name(StuckKind k) {
    switch (k) {
        case StuckKind::PreconditionFailed: return "precondition failed";
        case StuckKind::PostconditionFailed: return "postcondition failed";
        case StuckKind::InvariantFailed: return "invariant failed";
        case StuckKind::VariantNotPositive: return "variant not positive";
        case StuckKind::VariantNotDecreased: return "variant did not decrease";
        case StuckKind::UndefinedExpression: return "undefined expression";
        case StuckKind::FuelExhausted: return "fuel exhausted";
    }
    return "?";
}

struct StuckReason {
    StuckKind kind;
    Span span;
    std::string detail;
    State state;  // snapshot where execution got stuck

    std::string str() const {
        std::string out = span.str() + ": " + stuck_kind_name(kind);
        if (!detail.empty()) out += ": " + detail;
        return out;
    }
};

enum class RunMode { Checked, Erased };

struct ExecOptions {
    RunMode mode = RunMode::Checked;
    long long fuel = 1'000'000;  // loop-iteration budget for the whole run
    bool direct_sugar = false;   // interpret For/Map by direct iteration (test oracle)
};

using RunResult = std::variant<State, StuckReason>;

namespace detail {

struct Stuck {
    StuckReason reason;
};

class Exec {
public:
    Exec(const Program& prog, ExecOptions opts) : prog_(prog), opts_(opts), fuel_(opts.fuel) {}

    void run(State& sigma, const Sentence& s) { exec(sigma, s); }

    // Entry for a full procedure call with already-bound formals.
    void run_proc(State& sigma, const Procedure& p) {
        if (opts_.mode == RunMode::Checked) check_clauses(sigma, p.pre, StuckKind::PreconditionFailed);
        exec(sigma, *p.body);
        if (opts_.mode == RunMode::Checked) check_clauses(sigma, p.post, StuckKind::PostconditionFailed);
    }

private:
    const Program& prog_;
    ExecOptions opts_;
    long long fuel_;

    [[noreturn]] void stuck(StuckKind k, Span sp, std::string detail, const State& sigma) {
        throw Stuck{StuckReason{k, sp, std::move(detail), sigma}};
    }

    Value eval_or_stuck(const State& sigma, const Expr& e) {
        Undef why;
        auto v = eval_expr(sigma, e, &why);
        if (!v) stuck(StuckKind::UndefinedExpression, why.span, why.reason, sigma);
        return *v;
    }

    // Annotation check; clauses containing unbounded quantifiers are not
    // executable and are skipped.
    void check_clauses(const State& sigma, const std::vector<AnnClause>& clauses, StuckKind kind) {
        for (const auto& c : clauses) {
            if (contains_unbounded_exists(*c.pred)) continue;
            Value v = eval_or_stuck(sigma, *c.pred);
            if (!std::get<bool>(v))
                stuck(kind, c.pred->span, "", sigma);
        }
    }

    void drop_locals(State& sigma, const Sentence& body) {
        for (const auto& name : local_vars(body)) sigma.erase(name);
    }

    void spend_fuel(const State& sigma, Span sp) {
        if (--fuel_ < 0) stuck(StuckKind::FuelExhausted, sp, "", sigma);
    }

    void exec(State& sigma, const Sentence& s) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, SSkip>) {
                    // no effect
                } else if constexpr (std::is_same_v<T, SAssign>) {
                    sigma[x.target] = eval_or_stuck(sigma, *x.value);
                } else if constexpr (std::is_same_v<T, SLocal>) {
                    sigma[x.name] = eval_or_stuck(sigma, *x.init);
                } else if constexpr (std::is_same_v<T, SIf>) {
                    bool g = std::get<bool>(eval_or_stuck(sigma, *x.guard));
                    const Sentence& branch = g ? *x.then_branch : *x.else_branch;
                    exec(sigma, branch);
                    drop_locals(sigma, branch);
                } else if constexpr (std::is_same_v<T, SWhile>) {
                    exec_while(sigma, s, x);
                } else if constexpr (std::is_same_v<T, SCall>) {
                    exec_call(sigma, s, x);
                } else if constexpr (std::is_same_v<T, SFor>) {
                    if (!opts_.direct_sugar)
                        throw std::logic_error(s.span.str() +
                                               ": 'for' must be expanded before execution");
                    exec_for_direct(sigma, s, x);
                } else if constexpr (std::is_same_v<T, SMap>) {
                    if (!opts_.direct_sugar)
                        throw std::logic_error(s.span.str() +
                                               ": 'map' must be expanded before execution");
                    exec_map_direct(sigma, s, x);
                } else if constexpr (std::is_same_v<T, SSeq>) {
                    exec(sigma, *x.first);
                    exec(sigma, *x.second);
                }
            },
            s.node);
    }

    // O-WHILE-F / O-WHILE-T: the invariant is required before every guard
    // evaluation, including the final one; the variant must be positive on
    // entry to an iteration and strictly decrease across the body.
    void exec_while(State& sigma, const Sentence& s, const SWhile& w) {
        bool checked = opts_.mode == RunMode::Checked;
        for (;;) {
            if (checked) check_clauses(sigma, w.invariants, StuckKind::InvariantFailed);
            if (!std::get<bool>(eval_or_stuck(sigma, *w.guard))) return;
            spend_fuel(sigma, s.span);
            Int before;
            if (checked) {
                before = std::get<Int>(eval_or_stuck(sigma, *w.variant));
                if (before <= 0)
                    stuck(StuckKind::VariantNotPositive, w.variant->span,
                          "variant = " + before.str(), sigma);
            }
            exec(sigma, *w.body);
            if (checked) {
                Int after = std::get<Int>(eval_or_stuck(sigma, *w.variant));
                if (after >= before)
                    stuck(StuckKind::VariantNotDecreased, w.variant->span,
                          "variant went from " + before.str() + " to " + after.str(), sigma);
            }
            drop_locals(sigma, *w.body);
        }
    }

    // O-CALL: bind formals and formal@pre to the actuals' values, require
    // the callee contract around the body, then copy formals back out.
    void exec_call(State& sigma, const Sentence& s, const SCall& c) {
        const Procedure* callee = prog_.find(c.proc);
        if (!callee) throw std::logic_error("call to unknown procedure '" + c.proc + "'");
        State inner;
        for (size_t i = 0; i < c.actuals.size(); ++i) {
            const Value& v = sigma.at(c.actuals[i]);
            inner[callee->params[i]] = v;
            inner[at_pre_key(callee->params[i])] = v;
        }
        if (opts_.mode == RunMode::Checked)
            check_clauses(inner, callee->pre, StuckKind::PreconditionFailed);
        exec(inner, *callee->body);
        if (opts_.mode == RunMode::Checked)
            check_clauses(inner, callee->post, StuckKind::PostconditionFailed);
        for (size_t i = 0; i < c.actuals.size(); ++i)
            sigma[c.actuals[i]] = inner.at(callee->params[i]);
    }

    // Direct-iteration semantics for sugar, used as a test oracle only.
    void exec_for_direct(State& sigma, const Sentence& s, const SFor& f) {
        Int i = std::get<Int>(eval_or_stuck(sigma, *f.lo));
        for (;;) {
            Int hi = std::get<Int>(eval_or_stuck(sigma, *f.hi));
            if (i >= hi) break;
            spend_fuel(sigma, s.span);
            sigma[f.index] = Value{i};
            exec(sigma, *f.body);
            drop_locals(sigma, *f.body);
            ++i;
        }
        sigma.erase(f.index);
    }

    void exec_map_direct(State& sigma, const Sentence& s, const SMap& m) {
        for (Int i = 0;; ++i) {
            Int len = Int(std::get<Arr>(sigma.at(m.array)).size());
            if (i >= len) break;
            spend_fuel(sigma, s.span);
            sigma[m.index] = Value{i};
            exec(sigma, *m.body);
            drop_locals(sigma, *m.body);
        }
        sigma.erase(m.index);
    }
};

}  // namespace detail

// Execute a (desugared, type-checked) sentence from a state.
inline RunResult exec_sentence(State sigma, const Sentence& s, const Program& prog,
                               ExecOptions opts = {}) {
    detail::Exec ex(prog, opts);
    try {
        ex.run(sigma, s);
    } catch (const detail::Stuck& st) {
        return st.reason;
    }
    return sigma;
}

// Run one procedure on positional argument values. Checked mode evaluates
// the contract at the procedure boundary; erased mode skips every annotation
// but still traps undefined expressions in code positions.
inline RunResult run_procedure(const Program& prog, const std::string& name,
                               const std::vector<Value>& args, ExecOptions opts = {}) {
    const Procedure* p = prog.find(name);
    if (!p) throw std::logic_error("no procedure named '" + name + "'");
    if (args.size() != p->params.size())
        throw std::logic_error("'" + name + "' takes " + std::to_string(p->params.size()) +
                               " arguments, got " + std::to_string(args.size()));
    State sigma;
    for (size_t i = 0; i < args.size(); ++i) {
        sigma[p->params[i]] = args[i];
        sigma[at_pre_key(p->params[i])] = args[i];
    }
    detail::Exec ex(prog, opts);
    try {
        ex.run_proc(sigma, *p);
    } catch (const detail::Stuck& st) {
        return st.reason;
    }
    return sigma;
}

}  // namespace pest
