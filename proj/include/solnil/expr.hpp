#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "solnil/errors.hpp"

namespace solnil {

/// Tiny expression language for user-defined metric components.
///
/// Grammar: numeric constants, coordinates y1..yN, +, -, *, /, ^ (constant
/// exponent), pow(f, c) and exp(f). Good enough to state metric components
/// in closed form; partial derivatives are produced symbolically so
/// user-defined charts get exact dg/ddg like the built-in ones.
namespace expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp };

struct Node {
    Op op;
    double value = 0.0;   // Const: the constant; Pow: the exponent
    int var = -1;         // Var: zero-based coordinate index
    NodePtr lhs, rhs;

    static NodePtr constant(double v) {
        auto n = std::make_shared<Node>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }
    static NodePtr variable(int idx) {
        auto n = std::make_shared<Node>();
        n->op = Op::Var;
        n->var = idx;
        return n;
    }
    static NodePtr make(Op op, NodePtr l, NodePtr r = nullptr, double v = 0.0) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        n->value = v;
        return n;
    }
};

inline bool is_const(const NodePtr& n, double v) {
    return n->op == Op::Const && n->value == v;
}

// Constant folding plus the obvious algebraic identities. Keeps derivative
// trees from snowballing.
inline NodePtr simplify(const NodePtr& n) {
    switch (n->op) {
    case Op::Const:
    case Op::Var:
        return n;
    case Op::Neg: {
        NodePtr a = simplify(n->lhs);
        if (a->op == Op::Const) return Node::constant(-a->value);
        if (a->op == Op::Neg) return a->lhs;
        return Node::make(Op::Neg, a);
    }
    case Op::Exp: {
        NodePtr a = simplify(n->lhs);
        if (a->op == Op::Const) return Node::constant(std::exp(a->value));
        return Node::make(Op::Exp, a);
    }
    case Op::Pow: {
        NodePtr a = simplify(n->lhs);
        const double c = n->value;
        if (c == 0.0) return Node::constant(1.0);
        if (c == 1.0) return a;
        if (a->op == Op::Const) return Node::constant(std::pow(a->value, c));
        return Node::make(Op::Pow, a, nullptr, c);
    }
    case Op::Add: {
        NodePtr a = simplify(n->lhs), b = simplify(n->rhs);
        if (a->op == Op::Const && b->op == Op::Const) return Node::constant(a->value + b->value);
        if (is_const(a, 0.0)) return b;
        if (is_const(b, 0.0)) return a;
        return Node::make(Op::Add, a, b);
    }
    case Op::Sub: {
        NodePtr a = simplify(n->lhs), b = simplify(n->rhs);
        if (a->op == Op::Const && b->op == Op::Const) return Node::constant(a->value - b->value);
        if (is_const(b, 0.0)) return a;
        if (is_const(a, 0.0)) return simplify(Node::make(Op::Neg, b));
        return Node::make(Op::Sub, a, b);
    }
    case Op::Mul: {
        NodePtr a = simplify(n->lhs), b = simplify(n->rhs);
        if (a->op == Op::Const && b->op == Op::Const) return Node::constant(a->value * b->value);
        if (is_const(a, 0.0) || is_const(b, 0.0)) return Node::constant(0.0);
        if (is_const(a, 1.0)) return b;
        if (is_const(b, 1.0)) return a;
        return Node::make(Op::Mul, a, b);
    }
    case Op::Div: {
        NodePtr a = simplify(n->lhs), b = simplify(n->rhs);
        if (is_const(a, 0.0)) return Node::constant(0.0);
        if (is_const(b, 1.0)) return a;
        if (a->op == Op::Const && b->op == Op::Const && b->value != 0.0)
            return Node::constant(a->value / b->value);
        return Node::make(Op::Div, a, b);
    }
    }
    return n;
}

inline double evaluate(const NodePtr& n, const std::vector<double>& y) {
    switch (n->op) {
    case Op::Const: return n->value;
    case Op::Var: return y[static_cast<size_t>(n->var)];
    case Op::Add: return evaluate(n->lhs, y) + evaluate(n->rhs, y);
    case Op::Sub: return evaluate(n->lhs, y) - evaluate(n->rhs, y);
    case Op::Mul: return evaluate(n->lhs, y) * evaluate(n->rhs, y);
    case Op::Div: return evaluate(n->lhs, y) / evaluate(n->rhs, y);
    case Op::Neg: return -evaluate(n->lhs, y);
    case Op::Pow: return std::pow(evaluate(n->lhs, y), n->value);
    case Op::Exp: return std::exp(evaluate(n->lhs, y));
    }
    return 0.0;
}

inline NodePtr differentiate(const NodePtr& n, int var) {
    switch (n->op) {
    case Op::Const: return Node::constant(0.0);
    case Op::Var: return Node::constant(n->var == var ? 1.0 : 0.0);
    case Op::Add: return Node::make(Op::Add, differentiate(n->lhs, var), differentiate(n->rhs, var));
    case Op::Sub: return Node::make(Op::Sub, differentiate(n->lhs, var), differentiate(n->rhs, var));
    case Op::Neg: return Node::make(Op::Neg, differentiate(n->lhs, var));
    case Op::Mul:
        return Node::make(Op::Add,
                          Node::make(Op::Mul, differentiate(n->lhs, var), n->rhs),
                          Node::make(Op::Mul, n->lhs, differentiate(n->rhs, var)));
    case Op::Div:
        // (f/g)' = (f'g - fg') / g^2
        return Node::make(Op::Div,
                          Node::make(Op::Sub,
                                     Node::make(Op::Mul, differentiate(n->lhs, var), n->rhs),
                                     Node::make(Op::Mul, n->lhs, differentiate(n->rhs, var))),
                          Node::make(Op::Pow, n->rhs, nullptr, 2.0));
    case Op::Pow:
        // constant exponent: (f^c)' = c f^{c-1} f'
        return Node::make(Op::Mul,
                          Node::make(Op::Mul, Node::constant(n->value),
                                     Node::make(Op::Pow, n->lhs, nullptr, n->value - 1.0)),
                          differentiate(n->lhs, var));
    case Op::Exp:
        return Node::make(Op::Mul, Node::make(Op::Exp, n->lhs), differentiate(n->lhs, var));
    }
    return Node::constant(0.0);
}

inline std::string to_string(const NodePtr& n) {
    std::ostringstream os;
    switch (n->op) {
    case Op::Const: os << n->value; break;
    case Op::Var: os << "y" << (n->var + 1); break;
    case Op::Add: os << "(" << to_string(n->lhs) << " + " << to_string(n->rhs) << ")"; break;
    case Op::Sub: os << "(" << to_string(n->lhs) << " - " << to_string(n->rhs) << ")"; break;
    case Op::Mul: os << "(" << to_string(n->lhs) << " * " << to_string(n->rhs) << ")"; break;
    case Op::Div: os << "(" << to_string(n->lhs) << " / " << to_string(n->rhs) << ")"; break;
    case Op::Neg: os << "(-" << to_string(n->lhs) << ")"; break;
    case Op::Pow: os << "pow(" << to_string(n->lhs) << ", " << n->value << ")"; break;
    case Op::Exp: os << "exp(" << to_string(n->lhs) << ")"; break;
    }
    return os.str();
}

class Parser {
public:
    Parser(std::string text, int dim) : text_(std::move(text)), dim_(dim) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return simplify(e);
    }

private:
    std::string text_;
    size_t pos_ = 0;
    int dim_;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression '" + text_ + "' at offset " + std::to_string(pos_) + ": " + msg);
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr e = parse_term();
        for (;;) {
            if (consume('+')) e = Node::make(Op::Add, e, parse_term());
            else if (consume('-')) e = Node::make(Op::Sub, e, parse_term());
            else return e;
        }
    }
    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            if (consume('*')) e = Node::make(Op::Mul, e, parse_unary());
            else if (consume('/')) e = Node::make(Op::Div, e, parse_unary());
            else return e;
        }
    }
    NodePtr parse_unary() {
        if (consume('-')) return Node::make(Op::Neg, parse_unary());
        if (consume('+')) return parse_unary();
        return parse_power();
    }
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) {
            double c = parse_exponent_const();
            return Node::make(Op::Pow, base, nullptr, c);
        }
        return base;
    }
    double parse_exponent_const() {
        skip_ws();
        bool neg = consume('-');
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ == start) fail("exponent must be a numeric constant");
        double v = std::stod(text_.substr(start, pos_ - start));
        return neg ? -v : v;
    }
    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }
    NodePtr parse_number() {
        size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                ++pos_;
            } else if ((c == 'e' || c == 'E') && pos_ + 1 < text_.size() &&
                       (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
                        text_[pos_ + 1] == '+' || text_[pos_ + 1] == '-')) {
                pos_ += 2;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                break;
            }
        }
        try {
            return Node::constant(std::stod(text_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            fail("malformed number");
        }
    }
    NodePtr parse_identifier() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string id = text_.substr(start, pos_ - start);
        if (id == "exp") {
            if (!consume('(')) fail("expected '(' after exp");
            NodePtr arg = parse_sum();
            if (!consume(')')) fail("expected ')'");
            return Node::make(Op::Exp, arg);
        }
        if (id == "pow") {
            if (!consume('(')) fail("expected '(' after pow");
            NodePtr base = parse_sum();
            if (!consume(',')) fail("expected ',' in pow");
            double c = parse_exponent_const();
            skip_ws();
            if (!consume(')')) fail("expected ')'");
            return Node::make(Op::Pow, base, nullptr, c);
        }
        if (id.size() >= 2 && id[0] == 'y') {
            try {
                int idx = std::stoi(id.substr(1));
                if (idx < 1 || idx > dim_) fail("coordinate " + id + " out of range for dim " + std::to_string(dim_));
                return Node::variable(idx - 1);
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                // fall through to the unknown-identifier error
            }
        }
        fail("unknown identifier '" + id + "'");
    }
};

inline NodePtr parse(const std::string& text, int dim) {
    return Parser(text, dim).parse();
}

} // namespace expr
} // namespace solnil
