#pragma once

#include "pest/ast.hpp"

#include <sstream>
#include <string>

namespace pest {

// Precedence levels used by both the parser and the printer. Quantifiers are
// level 0: they grab greedily to the right and get parenthesized whenever
// they appear as an operand.
namespace prec {
inline constexpr int Quant = 0;
inline constexpr int Imp = 1;
inline constexpr int Or = 2;
inline constexpr int And = 3;
inline constexpr int Not = 4;
inline constexpr int Cmp = 5;
inline constexpr int Add = 6;
inline constexpr int Mul = 7;
inline constexpr int Unary = 8;
inline constexpr int Postfix = 9;
inline constexpr int Atom = 10;
}  // namespace prec

namespace detail {

inline int binop_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Imp: return prec::Imp;
        case BinaryOp::Or: return prec::Or;
        case BinaryOp::And: return prec::And;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne: return prec::Cmp;
        case BinaryOp::Add:
        case BinaryOp::Sub: return prec::Add;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return prec::Mul;
    }
    return prec::Atom;
}

inline const char* binop_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "/=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
        case BinaryOp::Imp: return "=>";
    }
    return "?";
}

inline void print_expr(std::ostream& os, const Expr& e, int parent) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                os << x.value;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                os << (x.value ? "true" : "false");
            } else if constexpr (std::is_same_v<T, Var>) {
                os << x.name;
            } else if constexpr (std::is_same_v<T, VarAtPre>) {
                os << x.name << "@pre";
            } else if constexpr (std::is_same_v<T, ArrayAccess>) {
                print_expr(os, *x.array, prec::Postfix);
                os << "[";
                print_expr(os, *x.index, prec::Quant);
                os << "]";
            } else if constexpr (std::is_same_v<T, ArraySize>) {
                os << "|";
                print_expr(os, *x.array, prec::Postfix);
                os << "|";
            } else if constexpr (std::is_same_v<T, ArrayUpdate>) {
                bool paren = parent > prec::Atom;  // never, update is primary
                if (paren) os << "(";
                os << "update ";
                print_expr(os, *x.array, prec::Postfix);
                os << " on ";
                print_expr(os, *x.index, prec::Add);
                os << " with ";
                print_expr(os, *x.value, prec::Add);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, Unary>) {
                int my = x.op == UnaryOp::Neg ? prec::Unary : prec::Not;
                bool paren = my < parent;
                if (paren) os << "(";
                os << (x.op == UnaryOp::Neg ? "-" : "!");
                print_expr(os, *x.arg, my);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, Binary>) {
                int my = binop_prec(x.op);
                bool paren = my < parent;
                if (paren) os << "(";
                // Comparison operands live at the additive level; imp is
                // right-associative, the other binary ops left-associative.
                int lhs_parent, rhs_parent;
                if (my == prec::Cmp) {
                    lhs_parent = rhs_parent = prec::Add;
                } else if (x.op == BinaryOp::Imp) {
                    lhs_parent = my + 1;
                    rhs_parent = my;
                } else {
                    lhs_parent = my;
                    rhs_parent = my + 1;
                }
                print_expr(os, *x.lhs, lhs_parent);
                os << " " << binop_text(x.op) << " ";
                print_expr(os, *x.rhs, rhs_parent);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, BoundedQuant>) {
                bool paren = prec::Quant < parent;
                if (paren) os << "(";
                os << (x.kind == QuantKind::Forall ? "forall-" : "exists-") << x.var << " / ";
                print_expr(os, *x.lo, prec::Add);
                os << " <= " << x.var << " < ";
                print_expr(os, *x.hi, prec::Add);
                os << " : ";
                print_expr(os, *x.body, prec::Quant);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, UnboundedExists>) {
                bool paren = prec::Quant < parent;
                if (paren) os << "(";
                os << "exists ";
                for (size_t i = 0; i < x.vars.size(); ++i) {
                    if (i) os << ",";
                    os << x.vars[i];
                }
                os << " (";
                print_expr(os, *x.body, prec::Quant);
                os << ")";
                if (paren) os << ")";
            }
        },
        e.node);
}

inline void indent(std::ostream& os, int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
}

inline void print_sentence(std::ostream& os, const Sentence& s, int depth) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SSkip>) {
                indent(os, depth);
                os << "skip\n";
            } else if constexpr (std::is_same_v<T, SAssign>) {
                indent(os, depth);
                os << x.target << " <- ";
                print_expr(os, *x.value, prec::Quant);
                os << "\n";
            } else if constexpr (std::is_same_v<T, SLocal>) {
                indent(os, depth);
                os << "local " << x.name << " <- ";
                print_expr(os, *x.init, prec::Quant);
                os << "\n";
            } else if constexpr (std::is_same_v<T, SIf>) {
                indent(os, depth);
                os << "if ";
                print_expr(os, *x.guard, prec::Quant);
                os << " then\n";
                print_sentence(os, *x.then_branch, depth + 1);
                indent(os, depth);
                os << "else\n";
                print_sentence(os, *x.else_branch, depth + 1);
                indent(os, depth);
                os << "fi\n";
            } else if constexpr (std::is_same_v<T, SWhile>) {
                indent(os, depth);
                os << "while ";
                print_expr(os, *x.guard, prec::Quant);
                os << "\n";
                for (const auto& c : x.invariants) {
                    indent(os, depth + 2);
                    os << ":?! ";
                    print_expr(os, *c.pred, prec::Quant);
                    os << "\n";
                }
                indent(os, depth + 2);
                os << ":# ";
                print_expr(os, *x.variant, prec::Quant);
                os << "\n";
                indent(os, depth);
                os << "do\n";
                print_sentence(os, *x.body, depth + 1);
                indent(os, depth);
                os << "od\n";
            } else if constexpr (std::is_same_v<T, SCall>) {
                indent(os, depth);
                os << "call " << x.proc << "(";
                for (size_t i = 0; i < x.actuals.size(); ++i) {
                    if (i) os << ", ";
                    os << x.actuals[i];
                }
                os << ")\n";
            } else if constexpr (std::is_same_v<T, SFor>) {
                indent(os, depth);
                os << "for " << x.index << " from ";
                print_expr(os, *x.lo, prec::Quant);
                os << " to ";
                print_expr(os, *x.hi, prec::Quant);
                os << " do\n";
                print_sentence(os, *x.body, depth + 1);
                indent(os, depth);
                os << "od\n";
            } else if constexpr (std::is_same_v<T, SMap>) {
                indent(os, depth);
                os << "map\n";
                print_sentence(os, *x.body, depth + 1);
                indent(os, depth);
                os << "in " << x.array << "[.." << x.index << "..]\n";
            } else if constexpr (std::is_same_v<T, SSeq>) {
                print_sentence(os, *x.first, depth);
                print_sentence(os, *x.second, depth);
            }
        },
        s.node);
}

}  // namespace detail

inline std::string pretty_print(const Expr& e) {
    std::ostringstream os;
    detail::print_expr(os, e, prec::Quant);
    return os.str();
}
inline std::string pretty_print(const ExprPtr& e) { return pretty_print(*e); }

inline std::string pretty_print(const Sentence& s, int depth = 0) {
    std::ostringstream os;
    detail::print_sentence(os, s, depth);
    return os.str();
}

inline std::string pretty_print(const Procedure& p) {
    std::ostringstream os;
    os << p.name << "(";
    for (size_t i = 0; i < p.params.size(); ++i) {
        if (i) os << ", ";
        os << p.params[i];
    }
    os << ")\n";
    for (const auto& c : p.pre) {
        os << ":? ";
        detail::print_expr(os, *c.pred, prec::Quant);
        os << "\n";
    }
    for (const auto& c : p.post) {
        os << ":! ";
        detail::print_expr(os, *c.pred, prec::Quant);
        os << "\n";
    }
    os << "{\n";
    detail::print_sentence(os, *p.body, 1);
    os << "}\n";
    return os.str();
}

inline std::string pretty_print(const Program& prog) {
    std::string out;
    for (size_t i = 0; i < prog.procedures.size(); ++i) {
        if (i) out += "\n";
        out += pretty_print(prog.procedures[i]);
    }
    return out;
}

}  // namespace pest
