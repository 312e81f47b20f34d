#pragma once

#include "pest/interp.hpp"
#include "pest/logic.hpp"
#include "pest/types.hpp"
#include "pest/vc.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pest {

// Lookup chain for nested searches: innermost assignment, then any bounded
// quantifier bindings active at the hook site, then the enclosing search.
struct OracleEnv {
    const std::map<std::string, Value>* own = nullptr;
    const std::vector<std::pair<std::string, Value>>* shadow = nullptr;
    const OracleEnv* parent = nullptr;

    const Value* find(const std::string& name) const {
        if (own) {
            auto it = own->find(name);
            if (it != own->end()) return &it->second;
        }
        if (shadow) {
            for (auto it = shadow->rbegin(); it != shadow->rend(); ++it)
                if (it->first == name) return &it->second;
        }
        return parent ? parent->find(name) : nullptr;
    }
};

// Exhaustive bounded enumeration: ints in [-B, B], array lengths 0..L with
// elements in [-B, B]; unbounded existential witnesses drawn from the same
// domain. Decides h ⊢ g by searching for a state that satisfies h while g
// does not evaluate to true, in a fixed deterministic order.
//
// The hypotheses produced by the postcondition calculus are conjunction and
// existential chains. The search flattens that spine into one constraint
// space (existential binders become auxiliary search variables), orders
// variables so that equations determine values as early as possible, and
// narrows array candidates through `update` equations and pointwise forall
// facts. Conjuncts are evaluated the moment their variables are bound.
// Existentials in any other position (under negation, disjunction, a
// quantifier, or in the goal) are decided by a recursive witness search at
// evaluation time.
class Oracle {
public:
    Oracle(TypeEnv env, int int_bound, int array_len_bound)
        : bound_(int_bound), len_bound_(array_len_bound), types_(env.vars) {
        for (const auto& [name, ty] : types_) pool_.used.insert(name);
    }

    Verdict check_entailment(const Predicate& hypothesis, const Predicate& goal) {
        ExprPtr g = simplify(goal);
        if (is_true_lit(*g)) return Verdict::valid();
        ExprPtr h = simplify(hypothesis);
        if (is_false_lit(*h)) return Verdict::valid();

        std::set<std::string> state_vars = free_vars(h);
        auto gv = free_vars(g);
        state_vars.insert(gv.begin(), gv.end());
        reserve_names(*h);
        reserve_names(*g);

        Scope top;
        for (const auto& v : state_vars) top.vars.emplace_back(v, type_of(v));
        build_into(top, h, /*lift_binders=*/true);
        finalize(top);

        goal_ = g;
        found_ = std::nullopt;
        state_names_ = &state_vars;
        std::map<std::string, Value> assignment;
        OracleEnv env{&assignment, nullptr, nullptr};
        bool saw_undef = false;
        if (run_checks_at(top, -1, env, -1, saw_undef) == Tri::True)
            dfs(top, 0, env, assignment, /*is_top=*/true, saw_undef);
        if (found_) return Verdict::invalid(std::move(*found_));
        return Verdict::bounded_valid(bound_, len_bound_);
    }

    // Evaluation with bounded witness search for unbounded existentials;
    // used to replay counterexamples against hypothesis and goal.
    std::optional<Value> eval_pred(const Expr& e, const State& sigma) {
        std::map<std::string, Value> own(sigma.begin(), sigma.end());
        OracleEnv env{&own, nullptr, nullptr};
        return eval(e, env, nullptr);
    }

private:
    enum class Tri { True, False, Undef };

    struct Check {
        ExprPtr expr;
        std::set<std::string> free;
        int trigger = -1;  // highest scope-variable index mentioned; -1: none
    };

    struct Scope {
        std::vector<std::pair<std::string, Ty>> vars;  // in search order
        std::vector<Check> checks;
        // nested exists-blocks that could not be lifted into this scope
        std::vector<std::unique_ptr<Scope>> blocks;
        std::vector<std::set<std::string>> block_free;
        std::vector<int> block_trigger;
    };

    int bound_;
    int len_bound_;
    std::map<std::string, Ty> types_;
    FreshPool pool_;
    ExprPtr goal_;
    std::optional<State> found_;
    const std::set<std::string>* state_names_ = nullptr;
    std::map<const void*, std::unique_ptr<Scope>> exists_cache_;

    friend struct OracleHook;
    struct OracleHook {
        Oracle* o;
        std::optional<Value> operator()(const UnboundedExists& u, Span sp, const OracleEnv& env,
                                        std::vector<std::pair<std::string, Value>>& shadow,
                                        Undef* why) const {
            return o->eval_exists(u, sp, env, shadow, why);
        }
    };

    std::optional<Value> eval(const Expr& e, const OracleEnv& env, Undef* why) {
        std::vector<std::pair<std::string, Value>> shadow;
        return detail::eval_impl(e, env, shadow, why, OracleHook{this});
    }

    void reserve_names(const Expr& e) {
        auto names = all_names(e);
        pool_.reserve(names);
    }

    Ty type_of(const std::string& name) const {
        auto it = types_.find(name);
        if (it == types_.end())
            throw std::logic_error("oracle: no type for free variable '" + name + "'");
        return it->second;
    }

    // ---- scope construction -------------------------------------------

    // Flatten the ∧/∃ spine. With lift_binders, existential binders become
    // scope variables of their own (renamed to globally fresh names); the
    // witness projection happens when a counterexample is reported.
    void build_into(Scope& sc, const ExprPtr& p, bool lift_binders) {
        if (const auto* b = p->as<Binary>(); b && b->op == BinaryOp::And) {
            build_into(sc, b->lhs, lift_binders);
            build_into(sc, b->rhs, lift_binders);
            return;
        }
        if (const auto* u = p->as<UnboundedExists>()) {
            TypeEnv ambient;
            ambient.vars = types_;
            auto btys = unbounded_var_types(u->vars, *u->body, ambient);
            std::vector<Subst> renames;
            ExprPtr body = u->body;
            std::vector<std::pair<std::string, Ty>> fresh_vars;
            for (const auto& v : u->vars) {
                std::string fresh = pool_.fresh(v);
                types_[fresh] = btys.at(v);
                fresh_vars.emplace_back(fresh, btys.at(v));
                if (fresh != v) renames.push_back({mk_var(v), mk_var(fresh)});
            }
            if (!renames.empty()) body = substitute_parallel(body, renames);
            if (lift_binders) {
                for (auto& fv : fresh_vars) sc.vars.push_back(std::move(fv));
                build_into(sc, body, lift_binders);
            } else {
                auto sub = std::make_unique<Scope>();
                sub->vars = std::move(fresh_vars);
                build_into(*sub, body, /*lift_binders=*/true);
                // hoist conjuncts that do not mention the binders
                std::set<std::string> binders;
                for (const auto& [n, t] : sub->vars) binders.insert(n);
                auto mentions = [&](const std::set<std::string>& fv) {
                    for (const auto& b2 : binders)
                        if (fv.count(b2)) return true;
                    return false;
                };
                std::vector<Check> keep;
                for (auto& c : sub->checks) {
                    if (mentions(c.free)) keep.push_back(std::move(c));
                    else sc.checks.push_back(std::move(c));
                }
                sub->checks = std::move(keep);
                sc.blocks.push_back(std::move(sub));
            }
            return;
        }
        sc.checks.push_back({p, free_vars(p), -1});
    }

    static std::set<std::string> scope_free(const Scope& sc) {
        std::set<std::string> out;
        for (const auto& c : sc.checks) out.insert(c.free.begin(), c.free.end());
        for (const auto& b : sc.blocks) {
            auto bf = scope_free(*b);
            out.insert(bf.begin(), bf.end());
        }
        for (const auto& [n, t] : sc.vars) out.erase(n);
        return out;
    }

    // ---- variable ordering ----------------------------------------------
    //
    // Greedy static order: place a variable as soon as some equation can
    // determine (or narrow) it from the ones already placed; otherwise place
    // the cheapest-domain variable. Triggers are computed afterwards.

    bool eq_mentions_only(const Check& c, const std::set<std::string>& placed,
                          const std::string& v) const {
        if (!c.free.count(v)) return false;
        for (const auto& n : c.free)
            if (n != v && !placed.count(n)) return false;
        return true;
    }

    bool has_equation_for(const Scope& sc, const std::set<std::string>& placed,
                          const std::string& v, bool arrays_only) const {
        for (const auto& c : sc.checks) {
            if (!eq_mentions_only(c, placed, v)) continue;
            if (const auto* b = c.expr->as<Binary>(); b && b->op == BinaryOp::Eq) {
                if (!arrays_only) return true;
                if (as_node<ArrayUpdate>(b->lhs) || as_node<ArrayUpdate>(b->rhs)) return true;
            }
            if (arrays_only) {
                if (const auto* q = c.expr->as<BoundedQuant>();
                    q && q->kind == QuantKind::Forall)
                    return true;
            }
        }
        return false;
    }

    void order_vars(Scope& sc) const {
        std::vector<std::pair<std::string, Ty>> remaining = std::move(sc.vars);
        std::sort(remaining.begin(), remaining.end());
        std::vector<std::pair<std::string, Ty>> order;
        std::set<std::string> placed;
        auto take = [&](size_t idx) {
            order.push_back(remaining[idx]);
            placed.insert(remaining[idx].first);
            remaining.erase(remaining.begin() + static_cast<long>(idx));
        };
        while (!remaining.empty()) {
            bool taken = false;
            // 1. a variable some equation pins down completely
            for (size_t i = 0; i < remaining.size() && !taken; ++i) {
                if (has_equation_for(sc, placed, remaining[i].first, /*arrays_only=*/false)) {
                    take(i);
                    taken = true;
                }
            }
            if (taken) continue;
            // 2. an array narrowable through an update or pointwise fact
            for (size_t i = 0; i < remaining.size() && !taken; ++i) {
                if (remaining[i].second == Ty::ArrInt &&
                    has_equation_for(sc, placed, remaining[i].first, /*arrays_only=*/true)) {
                    take(i);
                    taken = true;
                }
            }
            if (taken) continue;
            // 3. cheapest domain first: bools, ints, then arrays
            size_t best = 0;
            auto rank = [](Ty t) { return t == Ty::Bool ? 0 : t == Ty::Int ? 1 : 2; };
            for (size_t i = 1; i < remaining.size(); ++i)
                if (rank(remaining[i].second) < rank(remaining[best].second)) best = i;
            take(best);
        }
        sc.vars = std::move(order);
    }

    void finalize(Scope& sc) {
        order_vars(sc);
        auto level_of = [&](const std::set<std::string>& fv) {
            int lvl = -1;
            for (size_t i = 0; i < sc.vars.size(); ++i)
                if (fv.count(sc.vars[i].first)) lvl = static_cast<int>(i);
            return lvl;
        };
        for (auto& c : sc.checks) c.trigger = level_of(c.free);
        sc.block_free.clear();
        sc.block_trigger.clear();
        for (auto& b : sc.blocks) {
            finalize(*b);
            sc.block_free.push_back(scope_free(*b));
            sc.block_trigger.push_back(level_of(sc.block_free.back()));
        }
    }

    // ---- domains --------------------------------------------------------

    // 0, 1, -1, 2, -2, ..., B, -B
    Int spiral(int idx) const {
        if (idx == 0) return 0;
        int mag = (idx + 1) / 2;
        return idx % 2 == 1 ? Int(mag) : Int(-mag);
    }
    int int_domain_size() const { return 2 * bound_ + 1; }

    bool int_in_domain(const Int& v) const { return v >= -bound_ && v <= bound_; }
    bool value_in_domain(const Value& v) const {
        if (const auto* i = std::get_if<Int>(&v)) return int_in_domain(*i);
        if (const auto* a = std::get_if<Arr>(&v)) {
            if (static_cast<int>(a->size()) > len_bound_) return false;
            for (const auto& e : *a)
                if (!int_in_domain(e)) return false;
            return true;
        }
        return true;
    }

    // Deterministic per-variable candidate stream.
    struct DomainIter {
        enum class Mode { Ints, Bools, Arrays, List } mode;
        const Oracle* o = nullptr;
        int idx = 0;
        int len = 0;  // arrays: current length plus digit counters
        std::vector<int> digits;
        std::vector<Value> list;

        std::optional<Value> next() {
            switch (mode) {
                case Mode::Ints:
                    if (idx >= o->int_domain_size()) return std::nullopt;
                    return Value{o->spiral(idx++)};
                case Mode::Bools:
                    if (idx >= 2) return std::nullopt;
                    return Value{idx++ == 1};
                case Mode::List:
                    if (idx >= static_cast<int>(list.size())) return std::nullopt;
                    return list[idx++];
                case Mode::Arrays: {
                    if (len > o->len_bound_) return std::nullopt;
                    Arr out(digits.size());
                    for (size_t i = 0; i < digits.size(); ++i) out[i] = o->spiral(digits[i]);
                    int pos = static_cast<int>(digits.size()) - 1;
                    while (pos >= 0 && ++digits[pos] == o->int_domain_size()) {
                        digits[pos] = 0;
                        --pos;
                    }
                    if (pos < 0) {
                        ++len;
                        digits.assign(len, 0);
                    }
                    return Value{std::move(out)};
                }
            }
            return std::nullopt;
        }
    };

    DomainIter domain_for(Ty ty) const {
        DomainIter it;
        it.o = this;
        switch (ty) {
            case Ty::Int: it.mode = DomainIter::Mode::Ints; break;
            case Ty::Bool: it.mode = DomainIter::Mode::Bools; break;
            case Ty::ArrInt: it.mode = DomainIter::Mode::Arrays; break;
        }
        return it;
    }

    DomainIter list_domain(std::vector<Value> vals) const {
        DomainIter it;
        it.o = this;
        it.mode = DomainIter::Mode::List;
        it.list = std::move(vals);
        return it;
    }

    // ---- equation propagation ------------------------------------------

    static int count_free_occ(const Expr& e, const std::string& name) {
        int n = 0;
        std::set<std::string> bound;
        auto walk = [&](auto&& self, const Expr& x, std::set<std::string>& b) -> void {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, Var>) {
                        if (v.name == name && !b.count(name)) ++n;
                    } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                        self(self, *v.array, b);
                        self(self, *v.index, b);
                    } else if constexpr (std::is_same_v<T, ArraySize>) {
                        self(self, *v.array, b);
                    } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                        self(self, *v.array, b);
                        self(self, *v.index, b);
                        self(self, *v.value, b);
                    } else if constexpr (std::is_same_v<T, Unary>) {
                        self(self, *v.arg, b);
                    } else if constexpr (std::is_same_v<T, Binary>) {
                        self(self, *v.lhs, b);
                        self(self, *v.rhs, b);
                    } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                        self(self, *v.lo, b);
                        self(self, *v.hi, b);
                        bool added = b.insert(v.var).second;
                        self(self, *v.body, b);
                        if (added) b.erase(v.var);
                    } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                        std::vector<std::string> added;
                        for (const auto& w : v.vars)
                            if (b.insert(w).second) added.push_back(w);
                        self(self, *v.body, b);
                        for (const auto& w : added) b.erase(w);
                    }
                },
                x.node);
        };
        walk(walk, e, bound);
        return n;
    }

    // Isolate `name` in lhs = rhs along an addition/subtraction/negation
    // spine; the variable must occur exactly once in the whole equation.
    std::optional<Value> solve_eq(const Expr& lhs, const Expr& rhs, const std::string& name,
                                  const OracleEnv& env) {
        int occ_l = count_free_occ(lhs, name);
        int occ_r = count_free_occ(rhs, name);
        if (occ_l + occ_r != 1) return std::nullopt;
        const Expr* side = occ_l ? &lhs : &rhs;
        const Expr* other = occ_l ? &rhs : &lhs;
        std::optional<Value> target = eval(*other, env, nullptr);
        if (!target) return std::nullopt;
        const Expr* cur = side;
        for (;;) {
            if (const auto* v = cur->as<Var>(); v && v->name == name) return target;
            if (const auto* u = cur->as<Unary>(); u && u->op == UnaryOp::Neg) {
                if (!std::holds_alternative<Int>(*target)) return std::nullopt;
                target = Value{-std::get<Int>(*target)};
                cur = u->arg.get();
                continue;
            }
            const auto* b = cur->as<Binary>();
            if (!b || (b->op != BinaryOp::Add && b->op != BinaryOp::Sub)) return std::nullopt;
            if (!std::holds_alternative<Int>(*target)) return std::nullopt;
            bool in_lhs = count_free_occ(*b->lhs, name) > 0;
            const Expr* rest = in_lhs ? b->rhs.get() : b->lhs.get();
            std::optional<Value> rv = eval(*rest, env, nullptr);
            if (!rv || !std::holds_alternative<Int>(*rv)) return std::nullopt;
            Int t = std::get<Int>(*target), r = std::get<Int>(*rv);
            if (b->op == BinaryOp::Add) {
                target = Value{t - r};
            } else if (in_lhs) {
                target = Value{t + r};  // x - rest = t
            } else {
                target = Value{r - t};  // rest - x = t
            }
            cur = in_lhs ? b->lhs.get() : b->rhs.get();
        }
    }

    // E = update(v, i, w): v must agree with E everywhere but i, which
    // narrows its candidates to one per element value.
    std::optional<std::vector<Value>> narrow_update(const Expr& other, const ArrayUpdate& upd,
                                                    const std::string& name,
                                                    const OracleEnv& env) {
        const auto* base = upd.array->as<Var>();
        if (!base || base->name != name) return std::nullopt;
        if (count_free_occ(other, name) > 0 || count_free_occ(*upd.index, name) > 0)
            return std::nullopt;
        std::optional<Value> ov = eval(other, env, nullptr);
        if (!ov || !std::holds_alternative<Arr>(*ov)) return std::nullopt;
        std::optional<Value> iv = eval(*upd.index, env, nullptr);
        if (!iv || !std::holds_alternative<Int>(*iv)) return std::nullopt;
        const Arr& arr = std::get<Arr>(*ov);
        const Int& idx = std::get<Int>(*iv);
        if (idx < 0 || idx >= Int(arr.size())) return std::vector<Value>{};
        std::vector<Value> cands;
        cands.reserve(int_domain_size());
        for (int d = 0; d < int_domain_size(); ++d) {
            Arr c = arr;
            c[static_cast<size_t>(idx)] = spiral(d);
            Value cv{std::move(c)};
            if (value_in_domain(cv)) cands.push_back(std::move(cv));
        }
        return cands;
    }

    // forall-k / lo <= k < hi : body, where X occurs only as X[k]: arrays of
    // a given length satisfy it only with pinned cell values on [lo, hi).
    std::optional<std::vector<Value>> narrow_pointwise(const BoundedQuant& q,
                                                       const std::string& name,
                                                       const OracleEnv& env) {
        if (q.kind != QuantKind::Forall) return std::nullopt;
        if (count_free_occ(*q.lo, name) > 0 || count_free_occ(*q.hi, name) > 0)
            return std::nullopt;
        if (!only_cell_occurrences(*q.body, name, q.var)) return std::nullopt;
        std::optional<Value> lov = eval(*q.lo, env, nullptr);
        std::optional<Value> hiv = eval(*q.hi, env, nullptr);
        if (!lov || !hiv) return std::vector<Value>{};  // range undefined: never true
        Int lo = std::get<Int>(*lov), hi = std::get<Int>(*hiv);
        if (lo >= hi) return std::nullopt;  // vacuous: no constraint
        if (lo < 0 || hi > Int(len_bound_)) {
            // some k dereferences X out of range for every candidate length
            if (lo < 0) return std::vector<Value>{};
        }

        std::vector<Value> cands;
        std::vector<std::pair<std::string, Value>> shadow;
        for (int len = 0; len <= len_bound_; ++len) {
            if (hi > Int(len)) continue;  // X[k] would be undefined
            // candidate element lists per position, pinned inside [lo, hi)
            std::vector<std::vector<Int>> per_pos(static_cast<size_t>(len));
            bool len_ok = true;
            for (int p = 0; p < len && len_ok; ++p) {
                std::vector<Int>& ws = per_pos[static_cast<size_t>(p)];
                if (Int(p) < lo || Int(p) >= hi) {
                    for (int d = 0; d < int_domain_size(); ++d) ws.push_back(spiral(d));
                    continue;
                }
                Arr probe(static_cast<size_t>(len), Int(0));
                std::map<std::string, Value> local;
                OracleEnv probe_env{&local, nullptr, &env};
                shadow.assign(1, {q.var, Value{Int(p)}});
                for (int d = 0; d < int_domain_size(); ++d) {
                    probe[static_cast<size_t>(p)] = spiral(d);
                    local[name] = Value{probe};
                    auto r = detail::eval_impl(*q.body, probe_env, shadow, nullptr,
                                               OracleHook{this});
                    if (r && std::get<bool>(*r)) ws.push_back(spiral(d));
                }
                shadow.clear();
                if (ws.empty()) len_ok = false;
            }
            if (!len_ok) continue;
            // odometer over per-position candidates, rightmost fastest
            std::vector<size_t> idx(static_cast<size_t>(len), 0);
            for (;;) {
                Arr a(static_cast<size_t>(len));
                for (int p = 0; p < len; ++p) a[static_cast<size_t>(p)] = per_pos[static_cast<size_t>(p)][idx[static_cast<size_t>(p)]];
                cands.push_back(Value{std::move(a)});
                int pos = len - 1;
                while (pos >= 0 && ++idx[static_cast<size_t>(pos)] == per_pos[static_cast<size_t>(pos)].size()) {
                    idx[static_cast<size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
                if (len == 0) break;
            }
            if (len == 0) cands.push_back(Value{Arr{}});
        }
        return cands;
    }

    static bool only_cell_occurrences(const Expr& e, const std::string& arr,
                                      const std::string& idx) {
        bool ok = true;
        auto walk = [&](auto&& self, const Expr& x) -> void {
            if (!ok) return;
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, Var>) {
                        if (v.name == arr) ok = false;
                    } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                        const auto* base = as_node<Var>(v.array);
                        const auto* iv = as_node<Var>(v.index);
                        if (base && base->name == arr) {
                            if (!iv || iv->name != idx) ok = false;
                            return;  // X[k]: allowed
                        }
                        self(self, *v.array);
                        self(self, *v.index);
                    } else if constexpr (std::is_same_v<T, ArraySize>) {
                        self(self, *v.array);
                    } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                        self(self, *v.array);
                        self(self, *v.index);
                        self(self, *v.value);
                    } else if constexpr (std::is_same_v<T, Unary>) {
                        self(self, *v.arg);
                    } else if constexpr (std::is_same_v<T, Binary>) {
                        self(self, *v.lhs);
                        self(self, *v.rhs);
                    } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                        // a nested binder reusing the index name changes its
                        // meaning; bail out conservatively
                        if (v.var == idx || v.var == arr) {
                            ok = false;
                            return;
                        }
                        self(self, *v.lo);
                        self(self, *v.hi);
                        self(self, *v.body);
                    } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                        for (const auto& w : v.vars)
                            if (w == idx || w == arr) {
                                ok = false;
                                return;
                            }
                        self(self, *v.body);
                    }
                },
                x.node);
        };
        walk(walk, e);
        return ok;
    }

    // Candidate stream for the variable at `level`: a determining equation
    // beats narrowing beats full enumeration. Returns the index of a check
    // made true by construction, or -1.
    DomainIter candidates_for(const Scope& sc, int level, const OracleEnv& env,
                              int& solved_check) {
        const auto& [name, ty] = sc.vars[level];
        solved_check = -1;
        for (size_t ci = 0; ci < sc.checks.size(); ++ci) {
            const Check& c = sc.checks[ci];
            if (c.trigger != static_cast<int>(level) || !c.free.count(name)) continue;
            if (const auto* b = c.expr->as<Binary>(); b && b->op == BinaryOp::Eq) {
                if (auto v = solve_eq(*b->lhs, *b->rhs, name, env)) {
                    if (!value_in_domain(*v)) return list_domain({});
                    solved_check = static_cast<int>(ci);
                    return list_domain({std::move(*v)});
                }
                if (ty == Ty::ArrInt) {
                    if (const auto* upd = b->rhs->as<ArrayUpdate>()) {
                        if (auto cands = narrow_update(*b->lhs, *upd, name, env))
                            return list_domain(std::move(*cands));
                    }
                    if (const auto* upd = b->lhs->as<ArrayUpdate>()) {
                        if (auto cands = narrow_update(*b->rhs, *upd, name, env))
                            return list_domain(std::move(*cands));
                    }
                }
            }
            if (ty == Ty::ArrInt) {
                if (const auto* q = c.expr->as<BoundedQuant>()) {
                    if (auto cands = narrow_pointwise(*q, name, env))
                        return list_domain(std::move(*cands));
                }
            }
        }
        return domain_for(ty);
    }

    // ---- search ---------------------------------------------------------

    Tri run_checks_at(const Scope& sc, int level, const OracleEnv& env, int skip,
                      bool& saw_undef) {
        for (size_t ci = 0; ci < sc.checks.size(); ++ci) {
            if (static_cast<int>(ci) == skip) continue;
            const Check& c = sc.checks[ci];
            if (c.trigger != level) continue;
            Undef why;
            std::optional<Value> v = eval(*c.expr, env, &why);
            if (!v) {
                saw_undef = true;
                return Tri::Undef;
            }
            if (!std::get<bool>(*v)) return Tri::False;
        }
        for (size_t bi = 0; bi < sc.blocks.size(); ++bi) {
            if (sc.block_trigger[bi] != level) continue;
            Tri r = search_block(*sc.blocks[bi], env);
            if (r != Tri::True) {
                if (r == Tri::Undef) saw_undef = true;
                return r;
            }
        }
        return Tri::True;
    }

    // Witness search over a block's own variables under an enclosing
    // environment; True when some in-domain witness satisfies every conjunct.
    Tri search_block(Scope& sc, const OracleEnv& outer) {
        std::map<std::string, Value> assignment;
        OracleEnv env{&assignment, nullptr, &outer};
        bool saw_undef = false;
        Tri entry = run_checks_at(sc, -1, env, -1, saw_undef);
        if (entry != Tri::True) return entry;
        Tri r = dfs(sc, 0, env, assignment, /*is_top=*/false, saw_undef);
        if (r == Tri::True) return Tri::True;
        return saw_undef ? Tri::Undef : Tri::False;
    }

    Tri dfs(Scope& sc, int level, const OracleEnv& env, std::map<std::string, Value>& assignment,
            bool is_top, bool& saw_undef) {
        if (level == static_cast<int>(sc.vars.size())) {
            if (!is_top) return Tri::True;  // block witness found
            // hypothesis satisfied: the goal must evaluate to true
            Undef why;
            std::optional<Value> g = eval(*goal_, env, &why);
            if (g && std::get<bool>(*g)) return Tri::False;  // not a counterexample
            State cex;
            for (const auto& [k, v] : assignment)
                if (state_names_->count(k)) cex.emplace(k, v);
            found_ = std::move(cex);
            return Tri::True;
        }
        const std::string& name = sc.vars[static_cast<size_t>(level)].first;
        int solved = -1;
        DomainIter it = candidates_for(sc, level, env, solved);
        while (auto v = it.next()) {
            assignment[name] = std::move(*v);
            bool under = false;
            Tri ok = run_checks_at(sc, level, env, solved, under);
            saw_undef |= under;
            if (ok == Tri::True) {
                Tri r = dfs(sc, level + 1, env, assignment, is_top, saw_undef);
                if (r == Tri::True) {
                    assignment.erase(name);
                    return Tri::True;
                }
            }
            assignment.erase(name);
        }
        return Tri::False;  // the caller folds in saw_undef
    }

    // Witness search for an unbounded existential met during evaluation.
    std::optional<Value> eval_exists(const UnboundedExists& u, Span sp, const OracleEnv& env,
                                     std::vector<std::pair<std::string, Value>>& shadow,
                                     Undef* why) {
        const void* key = static_cast<const void*>(&u);
        auto it = exists_cache_.find(key);
        if (it == exists_cache_.end()) {
            auto sc = std::make_unique<Scope>();
            TypeEnv ambient;
            ambient.vars = types_;
            for (const auto& [n, v] : shadow) ambient.vars[n] = Ty::Int;
            auto btys = unbounded_var_types(u.vars, *u.body, ambient);
            ExprPtr body = u.body;
            std::vector<Subst> renames;
            for (const auto& v : u.vars) {
                std::string fresh = pool_.fresh(v);
                types_[fresh] = btys.at(v);
                sc->vars.emplace_back(fresh, btys.at(v));
                if (fresh != v) renames.push_back({mk_var(v), mk_var(fresh)});
            }
            if (!renames.empty()) body = substitute_parallel(body, renames);
            build_into(*sc, body, /*lift_binders=*/true);
            finalize(*sc);
            it = exists_cache_.emplace(key, std::move(sc)).first;
        }
        OracleEnv sub{nullptr, &shadow, &env};
        Tri r = search_block(*it->second, sub);
        if (r == Tri::True) return Value{true};
        if (r == Tri::False) return Value{false};
        detail::set_undef(why, sp, "undefined under every quantifier witness");
        return std::nullopt;
    }
};

// Convenience wrapper used by the solver front end and by tests.
inline Verdict oracle_check(const Predicate& h, const Predicate& g, const TypeEnv& env,
                            const SolverConfig& cfg) {
    Oracle o(env, cfg.int_bound, cfg.array_len_bound);
    return o.check_entailment(h, g);
}

// Evaluate a predicate (possibly with unbounded existentials) in a state,
// searching witnesses within the configured bounds.
inline std::optional<Value> oracle_eval(const Predicate& p, const State& sigma,
                                        const TypeEnv& env, const SolverConfig& cfg) {
    Oracle o(env, cfg.int_bound, cfg.array_len_bound);
    return o.eval_pred(*p, sigma);
}

}  // namespace pest
