#pragma once

#include <string>
#include <vector>

#include "roa/expr.hpp"
#include "roa/linalg.hpp"

namespace roa {

struct NotEquilibrium : std::runtime_error {
    explicit NotEquilibrium(const std::string& msg) : std::runtime_error(msg) {}
};

// Vector field with its linearization and quadratic certificate. All
// internal math is origin-centered: a non-origin equilibrium is shifted
// away at construction.
struct DynamicalSystem {
    std::string name;
    VectorExpr f;          // origin-centered right-hand side
    Box domain;            // origin-centered domain X
    std::vector<double> equilibrium;  // in original coordinates
    Matrix Q;              // defaults to identity
    Matrix A;              // Jacobian Df(0)
    VectorExpr g;          // nonlinear residual f - A x
    std::vector<std::vector<Expr>> Dg;  // Jacobian of g (= Df - A)
    bool hurwitz = false;
    Matrix P;              // solves P A + A^T P = -Q when A is Hurwitz

    std::size_t dim() const { return f.dim(); }
};

struct SystemOptions {
    std::vector<double> equilibrium;  // default: origin
    Matrix Q;                         // default: identity
    double equilibrium_tol = 1e-9;
};

// Parses the vector field, shifts the equilibrium to the origin, computes
// A = Df(0), g = f - A x, Dg = Df - A and the quadratic certificate P.
DynamicalSystem build_system(const std::string& name,
                             const std::vector<std::string>& f_texts,
                             const std::vector<std::string>& var_names,
                             const Box& domain,
                             const SystemOptions& options = {});

// Sum_i dV/dx_i * f_i, symbolically.
Expr lie_derivative(const Expr& V, const DynamicalSystem& sys);

// x^T P x as an expression over the system variables.
Expr quadratic_form_expr(const Matrix& P);

}  // namespace roa
