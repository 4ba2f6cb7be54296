#pragma once

#include <memory>
#include <string>
#include <vector>

#include "roa/interval.hpp"

namespace roa {

struct SyntaxError : std::runtime_error {
    std::size_t position;
    SyntaxError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)),
          position(pos) {}
};

struct UnknownSymbol : std::runtime_error {
    std::string name;
    explicit UnknownSymbol(const std::string& n)
        : std::runtime_error("unknown symbol '" + n + "'"), name(n) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Immutable scalar expression tree over indexed variables. Construction
// constant-folds; no other algebraic rewriting is performed, so the
// interval quality of a printed/reparsed expression is predictable.
class Expr {
public:
    enum class Kind {
        Const, Var, Neg, Add, Sub, Mul, Div, Pow,
        Sin, Cos, Tanh, Exp, Sqrt, Abs, Min, Max
    };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v);
    static Expr var(int index);

    static Expr neg(const Expr& a);
    static Expr add(const Expr& a, const Expr& b);
    static Expr sub(const Expr& a, const Expr& b);
    static Expr mul(const Expr& a, const Expr& b);
    static Expr div(const Expr& a, const Expr& b);
    static Expr pow(const Expr& a, int n);  // n >= 0
    static Expr sin(const Expr& a);
    static Expr cos(const Expr& a);
    static Expr tanh(const Expr& a);
    static Expr exp(const Expr& a);
    static Expr sqrt(const Expr& a);
    static Expr abs(const Expr& a);
    static Expr min(const Expr& a, const Expr& b);
    static Expr max(const Expr& a, const Expr& b);

    Kind kind() const;
    bool is_const() const;
    bool is_zero() const;
    double const_value() const;
    int var_index() const;
    int pow_exponent() const;
    Expr child(int i) const;  // 0 or 1

    bool equals(const Expr& other) const;

    double eval(const std::vector<double>& point) const;
    Interval eval_interval(const Box& box) const;

    // Exact partial derivative w.r.t. variable index; DomainError on
    // Abs/Min/Max nodes (those are admitted in verification queries only).
    Expr differentiate(int var) const;

    // Substitute each variable i by subs[i].
    Expr substitute(const std::vector<Expr>& subs) const;

    // Sorted indices of variables occurring in the tree.
    std::vector<int> free_vars() const;

    // True when the expression is a bounded function of its inputs over
    // all of R^n (constants, tanh/sin/cos of anything, and combinations
    // that preserve boundedness).
    bool bounded_over_reals() const;

    std::string print(const std::vector<std::string>& var_names) const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

// Infix grammar: + - * / ^ (right-assoc), unary minus, function calls
// sin/cos/tanh/exp/sqrt/abs/min/max, numeric literals, declared names.
// Precedence: ^ > unary - > * / > + -.
Expr parse_expr(const std::string& text, const std::vector<std::string>& vars);

// Ordered list of scalar expressions over a shared variable list.
struct VectorExpr {
    std::vector<Expr> exprs;
    std::vector<std::string> vars;

    std::size_t dim() const { return exprs.size(); }
    std::vector<double> eval(const std::vector<double>& point) const {
        std::vector<double> out(exprs.size());
        for (std::size_t i = 0; i < exprs.size(); ++i) out[i] = exprs[i].eval(point);
        return out;
    }
};

}  // namespace roa
