#include "roa/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace roa {

struct Expr::Node {
    Kind kind;
    double value = 0.0;      // Const
    int var = -1;            // Var
    int exponent = 0;        // Pow
    std::shared_ptr<const Node> a, b;
};

namespace {

using Kind = Expr::Kind;

double check_finite(double v) {
    if (!std::isfinite(v)) throw EvalError("non-finite value");
    return v;
}

}  // namespace

Expr Expr::constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = v;
    return Expr(n);
}

Expr Expr::var(int index) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = index;
    return Expr(n);
}

Expr::Kind Expr::kind() const { return node_->kind; }
bool Expr::is_const() const { return node_->kind == Kind::Const; }
bool Expr::is_zero() const { return is_const() && node_->value == 0.0; }
double Expr::const_value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }
int Expr::pow_exponent() const { return node_->exponent; }
Expr Expr::child(int i) const { return Expr(i == 0 ? node_->a : node_->b); }

// Smart constructors: fold constant subtrees, keep everything else as-is.

Expr Expr::neg(const Expr& a) {
    if (a.is_const()) return constant(-a.const_value());
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->a = a.node_;
    return Expr(n);
}

Expr Expr::add(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return constant(a.const_value() + b.const_value());
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Add;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(n);
}

Expr Expr::sub(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return constant(a.const_value() - b.const_value());
    if (b.is_zero()) return a;
    if (a.is_zero()) return neg(b);
    if (a.equals(b)) return constant(0.0);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sub;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(n);
}

Expr Expr::mul(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return constant(a.const_value() * b.const_value());
    if (a.is_zero() || b.is_zero()) return constant(0.0);
    if (a.is_const() && a.const_value() == 1.0) return b;
    if (b.is_const() && b.const_value() == 1.0) return a;
    if (a.is_const() && a.const_value() == -1.0) return neg(b);
    if (b.is_const() && b.const_value() == -1.0) return neg(a);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Mul;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(n);
}

Expr Expr::div(const Expr& a, const Expr& b) {
    if (b.is_const() && b.const_value() == 0.0) throw EvalError("division by constant zero");
    if (a.is_const() && b.is_const()) return constant(a.const_value() / b.const_value());
    if (a.is_zero()) return constant(0.0);
    if (b.is_const() && b.const_value() == 1.0) return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Div;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(n);
}

Expr Expr::pow(const Expr& a, int e) {
    if (e < 0) throw DomainError("negative integer exponent");
    if (e == 0) return constant(1.0);
    if (e == 1) return a;
    if (a.is_const()) return constant(std::pow(a.const_value(), e));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->exponent = e;
    n->a = a.node_;
    return Expr(n);
}

#define ROA_UNARY_CTOR(Name, Enum, fn)                          \
    Expr Expr::Name(const Expr& a) {                            \
        if (a.is_const()) return constant(fn(a.const_value())); \
        auto n = std::make_shared<Node>();                      \
        n->kind = Kind::Enum;                                   \
        n->a = a.node_;                                         \
        return Expr(n);                                         \
    }

ROA_UNARY_CTOR(sin, Sin, std::sin)
ROA_UNARY_CTOR(cos, Cos, std::cos)
ROA_UNARY_CTOR(tanh, Tanh, std::tanh)
ROA_UNARY_CTOR(exp, Exp, std::exp)
ROA_UNARY_CTOR(sqrt, Sqrt, std::sqrt)
ROA_UNARY_CTOR(abs, Abs, std::fabs)
#undef ROA_UNARY_CTOR

Expr Expr::min(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const())
        return constant(std::min(a.const_value(), b.const_value()));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Min;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(n);
}

Expr Expr::max(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const())
        return constant(std::max(a.const_value(), b.const_value()));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Max;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(n);
}

bool Expr::equals(const Expr& other) const {
    const Node* x = node_.get();
    const Node* y = other.node_.get();
    if (x == y) return true;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case Kind::Const: return x->value == y->value;
        case Kind::Var: return x->var == y->var;
        case Kind::Pow:
            return x->exponent == y->exponent && Expr(x->a).equals(Expr(y->a));
        default: break;
    }
    if ((x->a == nullptr) != (y->a == nullptr)) return false;
    if ((x->b == nullptr) != (y->b == nullptr)) return false;
    if (x->a && !Expr(x->a).equals(Expr(y->a))) return false;
    if (x->b && !Expr(x->b).equals(Expr(y->b))) return false;
    return true;
}

double Expr::eval(const std::vector<double>& p) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Var:
            if (n.var < 0 || static_cast<std::size_t>(n.var) >= p.size())
                throw EvalError("point dimension mismatch");
            return p[n.var];
        case Kind::Neg: return -Expr(n.a).eval(p);
        case Kind::Add: return check_finite(Expr(n.a).eval(p) + Expr(n.b).eval(p));
        case Kind::Sub: return check_finite(Expr(n.a).eval(p) - Expr(n.b).eval(p));
        case Kind::Mul: return check_finite(Expr(n.a).eval(p) * Expr(n.b).eval(p));
        case Kind::Div: {
            double d = Expr(n.b).eval(p);
            if (d == 0.0) throw EvalError("division by zero");
            return check_finite(Expr(n.a).eval(p) / d);
        }
        case Kind::Pow: return check_finite(std::pow(Expr(n.a).eval(p), n.exponent));
        case Kind::Sin: return std::sin(Expr(n.a).eval(p));
        case Kind::Cos: return std::cos(Expr(n.a).eval(p));
        case Kind::Tanh: return std::tanh(Expr(n.a).eval(p));
        case Kind::Exp: return check_finite(std::exp(Expr(n.a).eval(p)));
        case Kind::Sqrt: {
            double v = Expr(n.a).eval(p);
            if (v < 0.0) throw EvalError("sqrt of negative value");
            return std::sqrt(v);
        }
        case Kind::Abs: return std::fabs(Expr(n.a).eval(p));
        case Kind::Min: return std::min(Expr(n.a).eval(p), Expr(n.b).eval(p));
        case Kind::Max: return std::max(Expr(n.a).eval(p), Expr(n.b).eval(p));
    }
    throw EvalError("corrupt expression node");
}

Interval Expr::eval_interval(const Box& box) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Const: return Interval::point(n.value);
        case Kind::Var:
            if (n.var < 0 || static_cast<std::size_t>(n.var) >= box.size())
                throw EvalError("box dimension mismatch");
            return box[n.var];
        case Kind::Neg: return ineg(Expr(n.a).eval_interval(box));
        case Kind::Add: return iadd(Expr(n.a).eval_interval(box), Expr(n.b).eval_interval(box));
        case Kind::Sub: return isub(Expr(n.a).eval_interval(box), Expr(n.b).eval_interval(box));
        case Kind::Mul: return imul(Expr(n.a).eval_interval(box), Expr(n.b).eval_interval(box));
        case Kind::Div: return idiv(Expr(n.a).eval_interval(box), Expr(n.b).eval_interval(box));
        case Kind::Pow: return ipow(Expr(n.a).eval_interval(box), n.exponent);
        case Kind::Sin: return isin(Expr(n.a).eval_interval(box));
        case Kind::Cos: return icos(Expr(n.a).eval_interval(box));
        case Kind::Tanh: return itanh(Expr(n.a).eval_interval(box));
        case Kind::Exp: return iexp(Expr(n.a).eval_interval(box));
        case Kind::Sqrt: return isqrt(Expr(n.a).eval_interval(box));
        case Kind::Abs: return iabs(Expr(n.a).eval_interval(box));
        case Kind::Min: return imin(Expr(n.a).eval_interval(box), Expr(n.b).eval_interval(box));
        case Kind::Max: return imax(Expr(n.a).eval_interval(box), Expr(n.b).eval_interval(box));
    }
    throw EvalError("corrupt expression node");
}

Expr Expr::differentiate(int v) const {
    const Node& n = *node_;
    Expr a(n.a ? Expr(n.a) : Expr::constant(0.0));
    switch (n.kind) {
        case Kind::Const: return constant(0.0);
        case Kind::Var: return constant(n.var == v ? 1.0 : 0.0);
        case Kind::Neg: return neg(a.differentiate(v));
        case Kind::Add: return add(a.differentiate(v), Expr(n.b).differentiate(v));
        case Kind::Sub: return sub(a.differentiate(v), Expr(n.b).differentiate(v));
        case Kind::Mul: {
            Expr b(n.b);
            return add(mul(a.differentiate(v), b), mul(a, b.differentiate(v)));
        }
        case Kind::Div: {
            Expr b(n.b);
            return div(sub(mul(a.differentiate(v), b), mul(a, b.differentiate(v))),
                       pow(b, 2));
        }
        case Kind::Pow:
            return mul(mul(constant(n.exponent), pow(a, n.exponent - 1)),
                       a.differentiate(v));
        case Kind::Sin: return mul(cos(a), a.differentiate(v));
        case Kind::Cos: return neg(mul(sin(a), a.differentiate(v)));
        case Kind::Tanh:
            return mul(sub(constant(1.0), pow(tanh(a), 2)), a.differentiate(v));
        case Kind::Exp: return mul(exp(a), a.differentiate(v));
        case Kind::Sqrt:
            return div(a.differentiate(v), mul(constant(2.0), sqrt(a)));
        case Kind::Abs:
        case Kind::Min:
        case Kind::Max:
            throw DomainError("abs/min/max are not differentiable");
    }
    throw DomainError("corrupt expression node");
}

Expr Expr::substitute(const std::vector<Expr>& subs) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Const: return *this;
        case Kind::Var:
            if (n.var < 0 || static_cast<std::size_t>(n.var) >= subs.size())
                throw DomainError("substitution index out of range");
            return subs[n.var];
        case Kind::Neg: return neg(Expr(n.a).substitute(subs));
        case Kind::Add: return add(Expr(n.a).substitute(subs), Expr(n.b).substitute(subs));
        case Kind::Sub: return sub(Expr(n.a).substitute(subs), Expr(n.b).substitute(subs));
        case Kind::Mul: return mul(Expr(n.a).substitute(subs), Expr(n.b).substitute(subs));
        case Kind::Div: return div(Expr(n.a).substitute(subs), Expr(n.b).substitute(subs));
        case Kind::Pow: return pow(Expr(n.a).substitute(subs), n.exponent);
        case Kind::Sin: return sin(Expr(n.a).substitute(subs));
        case Kind::Cos: return cos(Expr(n.a).substitute(subs));
        case Kind::Tanh: return tanh(Expr(n.a).substitute(subs));
        case Kind::Exp: return exp(Expr(n.a).substitute(subs));
        case Kind::Sqrt: return sqrt(Expr(n.a).substitute(subs));
        case Kind::Abs: return abs(Expr(n.a).substitute(subs));
        case Kind::Min: return min(Expr(n.a).substitute(subs), Expr(n.b).substitute(subs));
        case Kind::Max: return max(Expr(n.a).substitute(subs), Expr(n.b).substitute(subs));
    }
    throw DomainError("corrupt expression node");
}

namespace {

void collect_vars(const Expr& e, std::set<int>& out) {
    switch (e.kind()) {
        case Kind::Const: return;
        case Kind::Var: out.insert(e.var_index()); return;
        case Kind::Neg: case Kind::Sin: case Kind::Cos: case Kind::Tanh:
        case Kind::Exp: case Kind::Sqrt: case Kind::Abs: case Kind::Pow:
            collect_vars(e.child(0), out);
            return;
        default:
            collect_vars(e.child(0), out);
            collect_vars(e.child(1), out);
            return;
    }
}

}  // namespace

std::vector<int> Expr::free_vars() const {
    std::set<int> s;
    collect_vars(*this, s);
    return {s.begin(), s.end()};
}

bool Expr::bounded_over_reals() const {
    switch (kind()) {
        case Kind::Const: return true;
        case Kind::Var: return false;
        case Kind::Sin: case Kind::Cos: case Kind::Tanh: return true;
        case Kind::Neg: case Kind::Abs: return child(0).bounded_over_reals();
        case Kind::Add: case Kind::Sub: case Kind::Mul:
        case Kind::Min: case Kind::Max:
            return child(0).bounded_over_reals() && child(1).bounded_over_reals();
        case Kind::Pow:
            return pow_exponent() == 0 || child(0).bounded_over_reals();
        case Kind::Sqrt: case Kind::Exp:
            // bounded argument implies bounded result for sqrt; exp of a
            // bounded argument is bounded as well
            return child(0).bounded_over_reals();
        case Kind::Div: return false;  // singularity screening is separate
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(Kind k) {
    switch (k) {
        case Kind::Add: case Kind::Sub: return 1;
        case Kind::Mul: case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

void print_rec(const Expr& e, const std::vector<std::string>& names,
               std::ostringstream& os, int parent_prec) {
    int prec = precedence(e.kind());
    bool need_parens = prec < parent_prec;
    if (need_parens) os << "(";
    switch (e.kind()) {
        case Kind::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e.const_value();
            os << tmp.str();
            break;
        }
        case Kind::Var: os << names.at(e.var_index()); break;
        case Kind::Neg:
            os << "-";
            print_rec(e.child(0), names, os, prec + 1);
            break;
        case Kind::Add:
            print_rec(e.child(0), names, os, prec);
            os << " + ";
            print_rec(e.child(1), names, os, prec + 1);
            break;
        case Kind::Sub:
            print_rec(e.child(0), names, os, prec);
            os << " - ";
            print_rec(e.child(1), names, os, prec + 1);
            break;
        case Kind::Mul:
            print_rec(e.child(0), names, os, prec);
            os << "*";
            print_rec(e.child(1), names, os, prec + 1);
            break;
        case Kind::Div:
            print_rec(e.child(0), names, os, prec);
            os << "/";
            print_rec(e.child(1), names, os, prec + 1);
            break;
        case Kind::Pow:
            print_rec(e.child(0), names, os, prec + 1);
            os << "^" << e.pow_exponent();
            break;
        case Kind::Sin: case Kind::Cos: case Kind::Tanh:
        case Kind::Exp: case Kind::Sqrt: case Kind::Abs: {
            const char* fn = nullptr;
            switch (e.kind()) {
                case Kind::Sin: fn = "sin"; break;
                case Kind::Cos: fn = "cos"; break;
                case Kind::Tanh: fn = "tanh"; break;
                case Kind::Exp: fn = "exp"; break;
                case Kind::Sqrt: fn = "sqrt"; break;
                default: fn = "abs"; break;
            }
            os << fn << "(";
            print_rec(e.child(0), names, os, 0);
            os << ")";
            break;
        }
        case Kind::Min: case Kind::Max:
            os << (e.kind() == Kind::Min ? "min(" : "max(");
            print_rec(e.child(0), names, os, 0);
            os << ", ";
            print_rec(e.child(1), names, os, 0);
            os << ")";
            break;
    }
    if (need_parens) os << ")";
}

}  // namespace

std::string Expr::print(const std::vector<std::string>& names) const {
    std::ostringstream os;
    print_rec(*this, names, os, 0);
    return os.str();
}

Expr operator-(const Expr& a) { return Expr::neg(a); }
Expr operator+(const Expr& a, const Expr& b) { return Expr::add(a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sub(a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul(a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }

// ---------------------------------------------------------------------------
// Parser: recursive descent over the infix grammar.

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    Expr parse_sum() {
        Expr lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = lhs + parse_term();
            else if (eat('-')) lhs = lhs - parse_term();
            else return lhs;
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            if (eat('*')) lhs = lhs * parse_unary();
            else if (eat('/')) lhs = lhs / parse_unary();
            else return lhs;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) {
            // right-associative, exponent must fold to a non-negative integer
            skip_ws();
            std::size_t at = pos;
            Expr e = parse_unary();
            if (!e.is_const()) throw SyntaxError("exponent must be a constant integer", at);
            double v = e.const_value();
            int n = static_cast<int>(v);
            if (v != n || n < 0) throw SyntaxError("exponent must be a non-negative integer", at);
            return Expr::pow(base, n);
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= text.size()) throw SyntaxError("unexpected end of input", pos);
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr e = parse_sum();
            if (!eat(')')) throw SyntaxError("expected ')'", pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
    }

    Expr parse_number() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
            ++pos;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            } else {
                pos = mark;
            }
        }
        try {
            return Expr::constant(std::stod(text.substr(start, pos - start)));
        } catch (const std::exception&) {
            throw SyntaxError("malformed number", start);
        }
    }

    Expr parse_ident() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (peek() == '(') {
            ++pos;  // consume '('
            Expr a = parse_sum();
            if (name == "min" || name == "max") {
                if (!eat(',')) throw SyntaxError("expected ',' in " + name, pos);
                Expr b = parse_sum();
                if (!eat(')')) throw SyntaxError("expected ')'", pos);
                return name == "min" ? Expr::min(a, b) : Expr::max(a, b);
            }
            if (!eat(')')) throw SyntaxError("expected ')'", pos);
            if (name == "sin") return Expr::sin(a);
            if (name == "cos") return Expr::cos(a);
            if (name == "tanh") return Expr::tanh(a);
            if (name == "exp") return Expr::exp(a);
            if (name == "sqrt") return Expr::sqrt(a);
            if (name == "abs") return Expr::abs(a);
            throw UnknownSymbol(name);
        }
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return Expr::var(static_cast<int>(i));
        throw UnknownSymbol(name);
    }
};

}  // namespace

Expr parse_expr(const std::string& text, const std::vector<std::string>& vars) {
    Parser p{text, vars};
    Expr e = p.parse_sum();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input", p.pos);
    return e;
}

}  // namespace roa
