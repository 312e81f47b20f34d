#pragma once

#include "pest/logic.hpp"
#include "pest/types.hpp"
#include "pest/vc.hpp"

#include <cctype>
#include <chrono>
#include <csignal>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace pest {

// ---------------------------------------------------------------------------
// SMT-LIB v2 emission
// ---------------------------------------------------------------------------
//
// Each int-array variable A becomes a pair (Array Int Int) plus a length
// |A#len| with length >= 0; array equality is equal lengths plus pointwise
// equality on [0, len); `update` is theory store; `/` and `%` are encoded to
// match the interpreter's truncation toward zero exactly. The script asserts
// hypothesis ∧ ¬goal and checks satisfiability: sat → Invalid, unsat → Valid.

namespace smt_detail {

inline std::string quote(const std::string& name) { return "|" + name + "|"; }
inline std::string len_name(const std::string& name) { return name + "#len"; }

class Emitter {
public:
    Emitter(const TypeEnv& env) : env_(env) {}

    std::string emit(const Predicate& hypothesis, const Predicate& goal) {
        std::set<std::string> vars = free_vars(hypothesis);
        auto gv = free_vars(goal);
        vars.insert(gv.begin(), gv.end());

        std::string h = encode_bool(*hypothesis);
        std::string g = encode_bool(*goal);

        std::ostringstream os;
        os << "(set-option :produce-models true)\n";
        os << "(set-logic AUFNIA)\n";
        if (uses_div_) {
            os << "(define-fun tdiv ((a Int) (b Int)) Int"
                  " (ite (>= a 0) (div a b) (- (div (- a) b))))\n";
            os << "(define-fun tmod ((a Int) (b Int)) Int (- a (* b (tdiv a b))))\n";
        }
        for (const auto& v : vars) {
            auto ty = env_.lookup(v);
            if (!ty) throw std::logic_error("smt: no type for free variable '" + v + "'");
            switch (*ty) {
                case Ty::Int:
                    os << "(declare-const " << quote(v) << " Int)\n";
                    break;
                case Ty::Bool:
                    os << "(declare-const " << quote(v) << " Bool)\n";
                    break;
                case Ty::ArrInt:
                    os << "(declare-const " << quote(v) << " (Array Int Int))\n";
                    os << "(declare-const " << quote(len_name(v)) << " Int)\n";
                    os << "(assert (>= " << quote(len_name(v)) << " 0))\n";
                    break;
            }
        }
        os << "(assert " << h << ")\n";
        os << "(assert (not " << g << "))\n";
        os << "(check-sat)\n";
        os << "(get-model)\n";
        return os.str();
    }

private:
    const TypeEnv& env_;
    bool uses_div_ = false;
    int fresh_ = 0;

    // bound-variable scope: source name -> (smt symbol, type)
    std::vector<std::tuple<std::string, std::string, Ty>> scope_;

    struct ArrRepr {
        std::string data;
        std::string len;
    };

    const std::tuple<std::string, std::string, Ty>* scoped(const std::string& name) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (std::get<0>(*it) == name) return &*it;
        return nullptr;
    }

    Ty type_of_var(const std::string& name) const {
        if (const auto* s = scoped(name)) return std::get<2>(*s);
        auto ty = env_.lookup(name);
        if (!ty) throw std::logic_error("smt: no type for variable '" + name + "'");
        return *ty;
    }

    bool is_array(const Expr& e) const {
        if (const auto* v = e.as<Var>()) return type_of_var(v->name) == Ty::ArrInt;
        if (const auto* v = e.as<VarAtPre>()) return type_of_var(at_pre_key(v->name)) == Ty::ArrInt;
        return e.is<ArrayUpdate>();
    }

    std::string fresh_sym(const std::string& base) {
        return base + "!" + std::to_string(fresh_++);
    }

    ArrRepr encode_array(const Expr& e) {
        if (const auto* v = e.as<Var>()) {
            if (const auto* s = scoped(v->name))
                return {quote(std::get<1>(*s)), quote(len_name(std::get<1>(*s)))};
            return {quote(v->name), quote(len_name(v->name))};
        }
        if (const auto* v = e.as<VarAtPre>()) {
            std::string n = at_pre_key(v->name);
            return {quote(n), quote(len_name(n))};
        }
        if (const auto* u = e.as<ArrayUpdate>()) {
            ArrRepr a = encode_array(*u->array);
            std::string i = encode_int(*u->index);
            std::string v = encode_int(*u->value);
            return {"(store " + a.data + " " + i + " " + v + ")", a.len};
        }
        throw std::logic_error("smt: expression is not an array");
    }

    std::string encode_int(const Expr& e) {
        return std::visit(
            [&](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    if (x.value < 0) return "(- " + (-x.value).str() + ")";
                    return x.value.str();
                } else if constexpr (std::is_same_v<T, Var>) {
                    if (const auto* s = scoped(x.name)) return quote(std::get<1>(*s));
                    return quote(x.name);
                } else if constexpr (std::is_same_v<T, VarAtPre>) {
                    return quote(at_pre_key(x.name));
                } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                    ArrRepr a = encode_array(*x.array);
                    return "(select " + a.data + " " + encode_int(*x.index) + ")";
                } else if constexpr (std::is_same_v<T, ArraySize>) {
                    return encode_array(*x.array).len;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    return "(- " + encode_int(*x.arg) + ")";
                } else if constexpr (std::is_same_v<T, Binary>) {
                    const char* op = nullptr;
                    switch (x.op) {
                        case BinaryOp::Add: op = "+"; break;
                        case BinaryOp::Sub: op = "-"; break;
                        case BinaryOp::Mul: op = "*"; break;
                        case BinaryOp::Div: op = "tdiv"; uses_div_ = true; break;
                        case BinaryOp::Mod: op = "tmod"; uses_div_ = true; break;
                        default: throw std::logic_error("smt: boolean operator in int position");
                    }
                    return std::string("(") + op + " " + encode_int(*x.lhs) + " " +
                           encode_int(*x.rhs) + ")";
                } else {
                    throw std::logic_error("smt: boolean expression in int position");
                }
            },
            e.node);
    }

    std::string encode_bool(const Expr& e) {
        return std::visit(
            [&](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, BoolLit>) {
                    return x.value ? "true" : "false";
                } else if constexpr (std::is_same_v<T, Var>) {
                    if (const auto* s = scoped(x.name)) return quote(std::get<1>(*s));
                    return quote(x.name);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    return "(not " + encode_bool(*x.arg) + ")";
                } else if constexpr (std::is_same_v<T, Binary>) {
                    switch (x.op) {
                        case BinaryOp::And:
                            return "(and " + encode_bool(*x.lhs) + " " + encode_bool(*x.rhs) + ")";
                        case BinaryOp::Or:
                            return "(or " + encode_bool(*x.lhs) + " " + encode_bool(*x.rhs) + ")";
                        case BinaryOp::Imp:
                            return "(=> " + encode_bool(*x.lhs) + " " + encode_bool(*x.rhs) + ")";
                        case BinaryOp::Lt:
                            return "(< " + encode_int(*x.lhs) + " " + encode_int(*x.rhs) + ")";
                        case BinaryOp::Le:
                            return "(<= " + encode_int(*x.lhs) + " " + encode_int(*x.rhs) + ")";
                        case BinaryOp::Gt:
                            return "(> " + encode_int(*x.lhs) + " " + encode_int(*x.rhs) + ")";
                        case BinaryOp::Ge:
                            return "(>= " + encode_int(*x.lhs) + " " + encode_int(*x.rhs) + ")";
                        case BinaryOp::Eq:
                            return encode_eq(*x.lhs, *x.rhs, false);
                        case BinaryOp::Ne:
                            return encode_eq(*x.lhs, *x.rhs, true);
                        default:
                            throw std::logic_error("smt: int operator in bool position");
                    }
                } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                    std::string lo = encode_int(*x.lo);
                    std::string hi = encode_int(*x.hi);
                    std::string k = fresh_sym(x.var);
                    scope_.emplace_back(x.var, k, Ty::Int);
                    std::string body = encode_bool(*x.body);
                    scope_.pop_back();
                    std::string range = "(and (<= " + lo + " " + quote(k) + ") (< " + quote(k) +
                                        " " + hi + "))";
                    if (x.kind == QuantKind::Forall)
                        return "(forall ((" + quote(k) + " Int)) (=> " + range + " " + body + "))";
                    return "(exists ((" + quote(k) + " Int)) (and " + range + " " + body + "))";
                } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                    TypeEnv ambient = env_;
                    for (const auto& [src, sym, ty] : scope_) ambient.vars[src] = ty;
                    auto btys = unbounded_var_types(x.vars, *x.body, ambient);
                    std::ostringstream binders, guards;
                    size_t mark = scope_.size();
                    bool has_guard = false;
                    for (const auto& v : x.vars) {
                        std::string sym = fresh_sym(v);
                        Ty ty = btys.at(v);
                        scope_.emplace_back(v, sym, ty);
                        switch (ty) {
                            case Ty::Int:
                                binders << "(" << quote(sym) << " Int) ";
                                break;
                            case Ty::Bool:
                                binders << "(" << quote(sym) << " Bool) ";
                                break;
                            case Ty::ArrInt:
                                binders << "(" << quote(sym) << " (Array Int Int)) ("
                                        << quote(len_name(sym)) << " Int) ";
                                guards << "(>= " << quote(len_name(sym)) << " 0) ";
                                has_guard = true;
                                break;
                        }
                    }
                    std::string body = encode_bool(*x.body);
                    scope_.resize(mark);
                    if (has_guard) body = "(and " + guards.str() + body + ")";
                    return "(exists (" + binders.str() + ") " + body + ")";
                } else {
                    throw std::logic_error("smt: int expression in bool position");
                }
            },
            e.node);
    }

    std::string encode_eq(const Expr& l, const Expr& r, bool negate) {
        std::string inner;
        if (is_array(l) || is_array(r)) {
            ArrRepr a = encode_array(l);
            ArrRepr b = encode_array(r);
            std::string k = quote(fresh_sym("k"));
            inner = "(and (= " + a.len + " " + b.len + ") (forall ((" + k + " Int)) (=> (and (<= 0 " +
                    k + ") (< " + k + " " + a.len + ")) (= (select " + a.data + " " + k +
                    ") (select " + b.data + " " + k + ")))))";
        } else if (l.is<BoolLit>() || r.is<BoolLit>() || bool_typed(l) || bool_typed(r)) {
            inner = "(= " + encode_bool(l) + " " + encode_bool(r) + ")";
        } else {
            inner = "(= " + encode_int(l) + " " + encode_int(r) + ")";
        }
        return negate ? "(not " + inner + ")" : inner;
    }

    bool bool_typed(const Expr& e) const {
        if (e.is<BoolLit>() || e.is<BoundedQuant>() || e.is<UnboundedExists>()) return true;
        if (const auto* v = e.as<Var>()) return type_of_var(v->name) == Ty::Bool;
        if (const auto* v = e.as<VarAtPre>()) return type_of_var(at_pre_key(v->name)) == Ty::Bool;
        if (const auto* u = e.as<Unary>()) return u->op == UnaryOp::Not;
        if (const auto* b = e.as<Binary>())
            return detail_is_bool_op(b->op);
        return false;
    }

    static bool detail_is_bool_op(BinaryOp op) {
        switch (op) {
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
            case BinaryOp::Eq:
            case BinaryOp::Ne:
            case BinaryOp::And:
            case BinaryOp::Or:
            case BinaryOp::Imp:
                return true;
            default:
                return false;
        }
    }
};

}  // namespace smt_detail

inline std::string emit_smtlib(const VC& vc) {
    smt_detail::Emitter em(vc.env);
    return em.emit(vc.hypothesis, vc.goal);
}

// ---------------------------------------------------------------------------
// Solver subprocess
// ---------------------------------------------------------------------------
//
// One process per VC: the script goes to the solver's stdin, the verdict and
// optional model are read from stdout. No incremental sessions.

struct ProcResult {
    bool spawn_failed = false;
    bool timed_out = false;
    int exit_code = -1;
    std::string output;
    std::string error;
};

inline ProcResult run_process(const std::vector<std::string>& argv, const std::string& input,
                              int timeout_ms) {
    ProcResult res;
    if (argv.empty()) {
        res.spawn_failed = true;
        res.error = "empty command";
        return res;
    }
    static bool sigpipe_ignored = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipe_ignored;

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe)) {
        res.spawn_failed = true;
        res.error = "pipe failed";
        return res;
    }
    fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

    pid_t pid = fork();
    if (pid < 0) {
        res.spawn_failed = true;
        res.error = "fork failed";
        return res;
    }
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(out_pipe[1], STDERR_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        std::vector<char*> cargv;
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        int err = errno;
        ssize_t ignored = write(err_pipe[1], &err, sizeof(err));
        (void)ignored;
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);

    // exec failure is reported over the close-on-exec pipe
    {
        int err = 0;
        ssize_t n = read(err_pipe[0], &err, sizeof(err));
        close(err_pipe[0]);
        if (n > 0) {
            close(in_pipe[1]);
            close(out_pipe[0]);
            waitpid(pid, nullptr, 0);
            res.spawn_failed = true;
            res.error = std::string("cannot run '") + argv[0] + "': " + std::strerror(err);
            return res;
        }
    }

    size_t written = 0;
    while (written < input.size()) {
        ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
        if (n <= 0) break;  // solver exited early; keep reading its output
        written += static_cast<size_t>(n);
    }
    close(in_pipe[1]);

    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    char buf[4096];
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
        if (left <= 0) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            close(out_pipe[0]);
            res.timed_out = true;
            return res;
        }
        struct pollfd pfd{out_pipe[0], POLLIN, 0};
        int pr = poll(&pfd, 1, static_cast<int>(left));
        if (pr == 0) continue;
        if (pr < 0) break;
        ssize_t n = read(out_pipe[0], buf, sizeof(buf));
        if (n <= 0) break;
        res.output.append(buf, static_cast<size_t>(n));
    }
    close(out_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

inline std::vector<std::string> split_command(const std::string& cmd) {
    std::vector<std::string> out;
    std::istringstream is(cmd);
    std::string word;
    while (is >> word) out.push_back(word);
    return out;
}

// ---------------------------------------------------------------------------
// Model parsing
// ---------------------------------------------------------------------------

namespace smt_detail {

struct Sexp {
    std::string atom;  // empty for lists
    std::vector<Sexp> items;
    bool is_list = false;
};

inline std::vector<std::string> sexp_tokens(const std::string& text) {
    std::vector<std::string> toks;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')') {
            toks.emplace_back(1, c);
            ++i;
        } else if (c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '|') {
            size_t j = text.find('|', i + 1);
            if (j == std::string::npos) j = text.size() - 1;
            toks.push_back(text.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')')
                ++j;
            toks.push_back(text.substr(i, j - i));
            i = j;
        }
    }
    return toks;
}

inline std::optional<Sexp> parse_sexp(const std::vector<std::string>& toks, size_t& pos) {
    if (pos >= toks.size()) return std::nullopt;
    if (toks[pos] == "(") {
        ++pos;
        Sexp list;
        list.is_list = true;
        while (pos < toks.size() && toks[pos] != ")") {
            auto item = parse_sexp(toks, pos);
            if (!item) return std::nullopt;
            list.items.push_back(std::move(*item));
        }
        if (pos >= toks.size()) return std::nullopt;
        ++pos;  // ')'
        return list;
    }
    Sexp atom;
    atom.atom = toks[pos++];
    return atom;
}

inline std::optional<Int> sexp_int(const Sexp& s) {
    if (!s.is_list) {
        const std::string& a = s.atom;
        if (a.empty()) return std::nullopt;
        size_t k = a[0] == '-' ? 1 : 0;
        if (k == a.size()) return std::nullopt;
        for (size_t i = k; i < a.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(a[i]))) return std::nullopt;
        return Int(a);
    }
    if (s.items.size() == 2 && !s.items[0].is_list && s.items[0].atom == "-") {
        auto v = sexp_int(s.items[1]);
        if (v) return -*v;
    }
    return std::nullopt;
}

// Interpret a model term as a function of one integer argument; enough for
// the const/store/lambda-ite shapes solvers print for (Array Int Int).
inline std::optional<Int> array_model_at(const Sexp& term, const Int& idx,
                                         const std::map<std::string, const Sexp*>& defs,
                                         int depth = 0) {
    if (depth > 64) return std::nullopt;
    if (!term.is_list) {
        auto it = defs.find(term.atom);
        if (it == defs.end()) return std::nullopt;
        return array_model_at(*it->second, idx, defs, depth + 1);
    }
    const auto& it_ = term.items;
    if (it_.empty()) return std::nullopt;
    // ((as const (Array Int Int)) v)
    if (it_.size() == 2 && it_[0].is_list && it_[0].items.size() >= 2 &&
        it_[0].items[0].atom == "as" && it_[0].items[1].atom == "const")
        return sexp_int(it_[1]);
    // (store a i v)
    if (it_.size() == 4 && it_[0].atom == "store") {
        auto i = sexp_int(it_[2]);
        if (!i) return std::nullopt;
        if (*i == idx) return sexp_int(it_[3]);
        return array_model_at(it_[1], idx, defs, depth + 1);
    }
    // (lambda ((x Int)) body) with ite chains on x
    if (it_.size() == 3 && it_[0].atom == "lambda" && it_[1].is_list &&
        it_[1].items.size() == 1 && it_[1].items[0].is_list && !it_[1].items[0].items.empty()) {
        const std::string& arg = it_[1].items[0].items[0].atom;
        const Sexp* body = &it_[2];
        while (body->is_list && body->items.size() == 4 && body->items[0].atom == "ite") {
            const Sexp& cond = body->items[1];
            if (cond.is_list && cond.items.size() == 3 && cond.items[0].atom == "=" &&
                ((cond.items[1].atom == arg && sexp_int(cond.items[2])) ||
                 (cond.items[2].atom == arg && sexp_int(cond.items[1])))) {
                Int c = cond.items[1].atom == arg ? *sexp_int(cond.items[2])
                                                  : *sexp_int(cond.items[1]);
                if (c == idx) return sexp_int(body->items[2]);
                body = &body->items[3];
                continue;
            }
            return std::nullopt;
        }
        return sexp_int(*body);
    }
    // (_ as-array f)
    if (it_.size() == 3 && it_[0].atom == "_" && it_[1].atom == "as-array") {
        auto it = defs.find(it_[2].atom);
        if (it == defs.end()) return std::nullopt;
        return array_model_at(*it->second, idx, defs, depth + 1);
    }
    return std::nullopt;
}

}  // namespace smt_detail

// Map a (get-model) answer back onto a State for the VC's free variables.
// Returns nullopt when the model shape cannot be interpreted.
inline std::optional<State> parse_smt_model(const std::string& output, const VC& vc) {
    using namespace smt_detail;
    auto toks = sexp_tokens(output);
    // skip the leading sat/unsat/unknown words
    size_t pos = 0;
    while (pos < toks.size() && toks[pos] != "(") ++pos;
    std::vector<Sexp> tops;
    while (pos < toks.size()) {
        auto s = parse_sexp(toks, pos);
        if (!s) break;
        tops.push_back(std::move(*s));
    }
    std::map<std::string, const Sexp*> defs;  // name -> value term
    auto scan = [&](const Sexp& s, auto&& self) -> void {
        if (!s.is_list) return;
        if (s.items.size() >= 5 && !s.items[0].is_list && s.items[0].atom == "define-fun") {
            defs[s.items[1].atom] = &s.items.back();
            return;
        }
        for (const auto& item : s.items) self(item, self);
    };
    for (const auto& t : tops) scan(t, scan);
    if (defs.empty()) return std::nullopt;

    std::set<std::string> vars = free_vars(vc.hypothesis);
    auto gv = free_vars(vc.goal);
    vars.insert(gv.begin(), gv.end());

    State st;
    for (const auto& v : vars) {
        auto ty = vc.env.lookup(v);
        if (!ty) return std::nullopt;
        if (*ty == Ty::Int) {
            auto it = defs.find(v);
            if (it == defs.end()) {
                st[v] = Value{Int(0)};  // irrelevant to the model
                continue;
            }
            auto val = sexp_int(*it->second);
            if (!val) return std::nullopt;
            st[v] = Value{*val};
        } else if (*ty == Ty::Bool) {
            auto it = defs.find(v);
            if (it == defs.end()) {
                st[v] = Value{false};
                continue;
            }
            if (it->second->atom == "true") st[v] = Value{true};
            else if (it->second->atom == "false") st[v] = Value{false};
            else return std::nullopt;
        } else {
            auto lit = defs.find(smt_detail::len_name(v));
            Int len = 0;
            if (lit != defs.end()) {
                auto lv = sexp_int(*lit->second);
                if (!lv || *lv < 0) return std::nullopt;
                len = *lv;
            }
            if (len > 1'000) return std::nullopt;  // degenerate model
            Arr arr;
            auto ait = defs.find(v);
            for (Int i = 0; i < len; ++i) {
                if (ait == defs.end()) {
                    arr.push_back(0);
                    continue;
                }
                auto el = smt_detail::array_model_at(*ait->second, i, defs);
                if (!el) return std::nullopt;
                arr.push_back(*el);
            }
            st[v] = Value{std::move(arr)};
        }
    }
    return st;
}

// Run one VC through the external prover. Spawn failures raise
// SolverUnavailable; timeouts and inconclusive answers map to Unknown.
inline Verdict smt_check(const VC& vc, const SolverConfig& cfg) {
    std::string script = emit_smtlib(vc);
    ProcResult pr = run_process(split_command(cfg.smt_command), script, cfg.timeout_ms);
    if (pr.spawn_failed) throw SolverUnavailable(pr.error);
    if (pr.timed_out) return Verdict::unknown("solver timeout");

    std::istringstream is(pr.output);
    std::string word;
    while (is >> word) {
        if (word == "unsat") return Verdict::valid();
        if (word == "sat") {
            if (auto st = parse_smt_model(pr.output, vc)) return Verdict::invalid(std::move(*st));
            return Verdict::invalid_no_model();
        }
        if (word == "unknown") return Verdict::unknown("solver answered unknown");
    }
    return Verdict::unknown("no answer from solver (exit code " + std::to_string(pr.exit_code) +
                            ")");
}

}  // namespace pest
