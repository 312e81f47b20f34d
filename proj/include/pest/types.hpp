#pragma once

#include "pest/ast.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pest {

enum class Ty { Int, Bool, ArrInt };

inline const char* ty_name(Ty t) {
    switch (t) {
        case Ty::Int: return "int";
        case Ty::Bool: return "bool";
        case Ty::ArrInt: return "int array";
    }
    return "?";
}

// Per-procedure variable typing. `x@pre` entries mirror the parameter's type.
struct TypeEnv {
    std::map<std::string, Ty> vars;

    std::optional<Ty> lookup(const std::string& name) const {
        auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const TypeEnv&) const = default;
};

using TypeEnvs = std::map<std::string, TypeEnv>;

class TypeError : public std::runtime_error {
public:
    enum class Kind { Ambiguous, Conflict };

    TypeError(Kind k, std::string var, Span a, Span b, std::string msg)
        : std::runtime_error(std::move(msg)), kind(k), variable(std::move(var)),
          first_site(a), second_site(b) {}

    Kind kind;
    std::string variable;
    Span first_site;
    Span second_site;

    static TypeError ambiguous(const std::string& var, Span site) {
        return TypeError(Kind::Ambiguous, var, site, site,
                         site.str() + ": type of '" + var + "' cannot be inferred from use");
    }
    static TypeError conflict(const std::string& what, Ty want, Ty got, Span prior, Span now) {
        return TypeError(Kind::Conflict, what, prior, now,
                         now.str() + ": " + what + " is used as " + ty_name(want) + " but was " +
                             ty_name(got) + " at " + prior.str());
    }
};

// Union-find over per-name type slots; the only type constructors are the
// three ground types, so unification is equality of slots plus grounding.
class TypeSolver {
public:
    int fresh_slot() {
        slots_.push_back({static_cast<int>(slots_.size()), std::nullopt, {}, ""});
        return static_cast<int>(slots_.size()) - 1;
    }

    int slot_for(const std::string& name, Span site) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        int s = fresh_slot();
        slots_[s].label = name;
        slots_[s].site = site;
        by_name_.emplace(name, s);
        return s;
    }

    bool has_name(const std::string& name) const { return by_name_.count(name) > 0; }

    void ground(int slot, Ty t, Span site) {
        int r = find(slot);
        if (slots_[r].ty) {
            if (*slots_[r].ty != t)
                throw TypeError::conflict(label_of(r), t, *slots_[r].ty, slots_[r].site, site);
            return;
        }
        slots_[r].ty = t;
        slots_[r].site = site;
    }

    void unify(int a, int b, Span site) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (slots_[ra].ty && slots_[rb].ty) {
            if (*slots_[ra].ty != *slots_[rb].ty)
                throw TypeError::conflict(label_of(rb), *slots_[ra].ty, *slots_[rb].ty,
                                          slots_[rb].site, site);
        }
        // keep the grounded (or labelled) representative
        if (slots_[rb].ty && !slots_[ra].ty) std::swap(ra, rb);
        slots_[rb].parent = ra;
        if (!slots_[ra].ty && slots_[rb].ty) slots_[ra].ty = slots_[rb].ty;
        if (slots_[ra].label.empty()) slots_[ra].label = slots_[rb].label;
    }

    std::optional<Ty> resolve(int slot) { return slots_[find(slot)].ty; }

    Span site_of(int slot) { return slots_[find(slot)].site; }

private:
    struct Slot {
        int parent;
        std::optional<Ty> ty;
        Span site;          // where the type was pinned (or the name introduced)
        std::string label;  // variable name, for diagnostics
    };
    std::vector<Slot> slots_;
    std::map<std::string, int> by_name_;

    int find(int s) {
        while (slots_[s].parent != s) s = slots_[s].parent = slots_[slots_[s].parent].parent;
        return s;
    }
    std::string label_of(int r) {
        return slots_[r].label.empty() ? "expression" : "'" + slots_[r].label + "'";
    }
};

namespace detail {

// Type slot or ground type of a subexpression.
struct TyRef {
    std::optional<Ty> ground;
    int slot = -1;
};

class ExprTyper {
public:
    ExprTyper(TypeSolver& solver) : solver_(solver) {}

    // Bound-variable scopes (quantifiers) shadow program variables.
    std::vector<std::pair<std::string, int>> shadow;

    TyRef type_of(const Expr& e) {
        return std::visit(
            [&](const auto& x) -> TyRef {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    return {Ty::Int, -1};
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    return {Ty::Bool, -1};
                } else if constexpr (std::is_same_v<T, Var>) {
                    for (auto it = shadow.rbegin(); it != shadow.rend(); ++it)
                        if (it->first == x.name) return {solver_.resolve(it->second), it->second};
                    int s = solver_.slot_for(x.name, e.span);
                    return {solver_.resolve(s), s};
                } else if constexpr (std::is_same_v<T, VarAtPre>) {
                    int s = solver_.slot_for(x.name, e.span);
                    return {solver_.resolve(s), s};
                } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                    demand(*x.array, Ty::ArrInt);
                    demand(*x.index, Ty::Int);
                    return {Ty::Int, -1};
                } else if constexpr (std::is_same_v<T, ArraySize>) {
                    demand(*x.array, Ty::ArrInt);
                    return {Ty::Int, -1};
                } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                    demand(*x.array, Ty::ArrInt);
                    demand(*x.index, Ty::Int);
                    demand(*x.value, Ty::Int);
                    return {Ty::ArrInt, -1};
                } else if constexpr (std::is_same_v<T, Unary>) {
                    Ty t = x.op == UnaryOp::Neg ? Ty::Int : Ty::Bool;
                    demand(*x.arg, t);
                    return {t, -1};
                } else if constexpr (std::is_same_v<T, Binary>) {
                    switch (x.op) {
                        case BinaryOp::Add:
                        case BinaryOp::Sub:
                        case BinaryOp::Mul:
                        case BinaryOp::Div:
                        case BinaryOp::Mod:
                            demand(*x.lhs, Ty::Int);
                            demand(*x.rhs, Ty::Int);
                            return {Ty::Int, -1};
                        case BinaryOp::Lt:
                        case BinaryOp::Le:
                        case BinaryOp::Gt:
                        case BinaryOp::Ge:
                            demand(*x.lhs, Ty::Int);
                            demand(*x.rhs, Ty::Int);
                            return {Ty::Bool, -1};
                        case BinaryOp::Eq:
                        case BinaryOp::Ne: {
                            TyRef l = type_of(*x.lhs);
                            TyRef r = type_of(*x.rhs);
                            merge(l, r, e.span);
                            return {Ty::Bool, -1};
                        }
                        case BinaryOp::And:
                        case BinaryOp::Or:
                        case BinaryOp::Imp:
                            demand(*x.lhs, Ty::Bool);
                            demand(*x.rhs, Ty::Bool);
                            return {Ty::Bool, -1};
                    }
                    return {Ty::Bool, -1};
                } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                    demand(*x.lo, Ty::Int);
                    demand(*x.hi, Ty::Int);
                    int s = solver_.fresh_slot();
                    solver_.ground(s, Ty::Int, e.span);
                    shadow.emplace_back(x.var, s);
                    demand(*x.body, Ty::Bool);
                    shadow.pop_back();
                    return {Ty::Bool, -1};
                } else {
                    const auto& u = static_cast<const UnboundedExists&>(x);
                    size_t mark = shadow.size();
                    for (const auto& v : u.vars) shadow.emplace_back(v, solver_.fresh_slot());
                    demand(*u.body, Ty::Bool);
                    shadow.resize(mark);
                    return {Ty::Bool, -1};
                }
            },
            e.node);
    }

    void demand(const Expr& e, Ty want) {
        TyRef r = type_of(e);
        if (r.slot >= 0) {
            solver_.ground(r.slot, want, e.span);
        } else if (r.ground && *r.ground != want) {
            throw TypeError::conflict("expression", want, *r.ground, e.span, e.span);
        }
    }

private:
    TypeSolver& solver_;

    void merge(const TyRef& l, const TyRef& r, Span site) {
        if (l.slot >= 0 && r.slot >= 0) {
            solver_.unify(l.slot, r.slot, site);
        } else if (l.slot >= 0 && r.ground) {
            solver_.ground(l.slot, *r.ground, site);
        } else if (r.slot >= 0 && l.ground) {
            solver_.ground(r.slot, *l.ground, site);
        } else if (l.ground && r.ground && *l.ground != *r.ground) {
            throw TypeError::conflict("expression", *l.ground, *r.ground, site, site);
        }
    }
};

}  // namespace detail

// Monomorphic type inference from use, procedure by procedure in program
// order. Call sites constrain actuals against the callee's (already fixed)
// parameter types. A variable whose type is unconstrained is an error.
inline TypeEnvs infer_types(const Program& prog) {
    TypeEnvs envs;
    for (const auto& proc : prog.procedures) {
        TypeSolver solver;
        detail::ExprTyper typer(solver);
        std::vector<std::pair<std::string, Span>> introduced;

        for (const auto& p : proc.params) {
            solver.slot_for(p, proc.span);
            introduced.emplace_back(p, proc.span);
        }
        for (const auto& c : proc.pre) typer.demand(*c.pred, Ty::Bool);
        for (const auto& c : proc.post) typer.demand(*c.pred, Ty::Bool);

        // x@pre shares x's type.
        for (const auto& p : proc.params)
            solver.unify(solver.slot_for(p, proc.span),
                         solver.slot_for(at_pre_key(p), proc.span), proc.span);

        auto walk = [&](auto&& self, const Sentence& s) -> void {
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, SAssign>) {
                        detail::TyRef v{solver.resolve(solver.slot_for(x.target, s.span)),
                                        solver.slot_for(x.target, s.span)};
                        detail::TyRef e = typer.type_of(*x.value);
                        if (e.ground) solver.ground(v.slot, *e.ground, x.value->span);
                        else if (e.slot >= 0) solver.unify(v.slot, e.slot, s.span);
                    } else if constexpr (std::is_same_v<T, SLocal>) {
                        if (!solver.has_name(x.name)) introduced.emplace_back(x.name, s.span);
                        int v = solver.slot_for(x.name, s.span);
                        detail::TyRef e = typer.type_of(*x.init);
                        if (e.ground) solver.ground(v, *e.ground, x.init->span);
                        else if (e.slot >= 0) solver.unify(v, e.slot, s.span);
                    } else if constexpr (std::is_same_v<T, SIf>) {
                        typer.demand(*x.guard, Ty::Bool);
                        self(self, *x.then_branch);
                        self(self, *x.else_branch);
                    } else if constexpr (std::is_same_v<T, SWhile>) {
                        typer.demand(*x.guard, Ty::Bool);
                        for (const auto& c : x.invariants) typer.demand(*c.pred, Ty::Bool);
                        typer.demand(*x.variant, Ty::Int);
                        self(self, *x.body);
                    } else if constexpr (std::is_same_v<T, SCall>) {
                        const TypeEnv& callee = envs.at(x.proc);
                        const Procedure* cp = prog.find(x.proc);
                        for (size_t i = 0; i < x.actuals.size(); ++i) {
                            Ty formal = callee.vars.at(cp->params[i]);
                            solver.ground(solver.slot_for(x.actuals[i], s.span), formal, s.span);
                        }
                    } else if constexpr (std::is_same_v<T, SFor>) {
                        typer.demand(*x.lo, Ty::Int);
                        typer.demand(*x.hi, Ty::Int);
                        if (!solver.has_name(x.index)) introduced.emplace_back(x.index, s.span);
                        solver.ground(solver.slot_for(x.index, s.span), Ty::Int, s.span);
                        self(self, *x.body);
                    } else if constexpr (std::is_same_v<T, SMap>) {
                        solver.ground(solver.slot_for(x.array, s.span), Ty::ArrInt, s.span);
                        if (!solver.has_name(x.index)) introduced.emplace_back(x.index, s.span);
                        solver.ground(solver.slot_for(x.index, s.span), Ty::Int, s.span);
                        self(self, *x.body);
                    } else if constexpr (std::is_same_v<T, SSeq>) {
                        self(self, *x.first);
                        self(self, *x.second);
                    }
                },
                s.node);
        };
        walk(walk, *proc.body);

        TypeEnv env;
        for (const auto& [name, site] : introduced) {
            auto ty = solver.resolve(solver.slot_for(name, site));
            if (!ty) throw TypeError::ambiguous(name, solver.site_of(solver.slot_for(name, site)));
            env.vars[name] = *ty;
        }
        for (const auto& p : proc.params) env.vars[at_pre_key(p)] = env.vars.at(p);
        envs[proc.name] = std::move(env);
    }
    return envs;
}

// Types for the bound variables of an unbounded existential, inferred from
// use inside the body against an ambient environment. A bound variable with
// no constraining use defaults to Int (its instantiation type cannot affect
// the truth value in that case).
inline std::map<std::string, Ty> unbounded_var_types(const std::vector<std::string>& vars,
                                                     const Expr& body, const TypeEnv& env) {
    TypeSolver solver;
    for (const auto& [name, ty] : env.vars) solver.ground(solver.slot_for(name, {}), ty, {});
    detail::ExprTyper typer(solver);
    for (const auto& v : vars) typer.shadow.emplace_back(v, solver.fresh_slot());
    auto shadow = typer.shadow;  // keep slots; demand() pops nothing at this level
    typer.demand(body, Ty::Bool);
    std::map<std::string, Ty> out;
    for (size_t i = 0; i < vars.size(); ++i)
        out[vars[i]] = solver.resolve(shadow[i].second).value_or(Ty::Int);
    return out;
}

}  // namespace pest
