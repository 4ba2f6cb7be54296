#include "roa/system.hpp"

#include <cmath>

namespace roa {

Expr quadratic_form_expr(const Matrix& P) {
    Expr v = Expr::constant(0.0);
    for (int i = 0; i < P.rows(); ++i)
        for (int j = 0; j < P.cols(); ++j) {
            if (P(i, j) == 0.0) continue;
            v = v + Expr::constant(P(i, j)) * Expr::var(i) * Expr::var(j);
        }
    return v;
}

DynamicalSystem build_system(const std::string& name,
                             const std::vector<std::string>& f_texts,
                             const std::vector<std::string>& var_names,
                             const Box& domain,
                             const SystemOptions& options) {
    const std::size_t n = f_texts.size();
    if (var_names.size() != n || domain.size() != n)
        throw NotEquilibrium("state dimension mismatch between f, vars and domain");

    DynamicalSystem sys;
    sys.name = name;
    sys.f.vars = var_names;
    sys.domain = domain;
    sys.equilibrium = options.equilibrium.empty()
                          ? std::vector<double>(n, 0.0)
                          : options.equilibrium;
    if (sys.equilibrium.size() != n)
        throw NotEquilibrium("equilibrium dimension mismatch");

    std::vector<Expr> raw;
    raw.reserve(n);
    for (const auto& text : f_texts) raw.push_back(parse_expr(text, var_names));

    // shift the equilibrium to the origin: x <- x - x*
    bool shifted = false;
    for (double v : sys.equilibrium)
        if (v != 0.0) shifted = true;
    if (shifted) {
        std::vector<Expr> subs;
        subs.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            subs.push_back(Expr::var(static_cast<int>(i)) +
                           Expr::constant(sys.equilibrium[i]));
        for (auto& e : raw) e = e.substitute(subs);
        for (std::size_t i = 0; i < n; ++i) {
            sys.domain[i].lo -= sys.equilibrium[i];
            sys.domain[i].hi -= sys.equilibrium[i];
        }
    }
    sys.f.exprs = raw;

    std::vector<double> origin(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = sys.f.exprs[i].eval(origin);
        if (std::fabs(v) > options.equilibrium_tol)
            throw NotEquilibrium("f(x*) component " + std::to_string(i + 1) +
                                 " = " + std::to_string(v));
    }
    if (!(sys.domain.contains(origin)))
        throw NotEquilibrium("domain does not contain the equilibrium");

    const int ni = static_cast<int>(n);
    sys.A = Matrix(ni, ni);
    std::vector<std::vector<Expr>> Df(n, std::vector<Expr>(n));
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j) {
            Df[i][j] = sys.f.exprs[i].differentiate(j);
            sys.A(i, j) = Df[i][j].eval(origin);
        }

    // g = f - A x and Dg = Df - A, both symbolic
    sys.g.vars = var_names;
    sys.g.exprs.reserve(n);
    for (int i = 0; i < ni; ++i) {
        Expr ax = Expr::constant(0.0);
        for (int j = 0; j < ni; ++j) {
            if (sys.A(i, j) == 0.0) continue;
            ax = ax + Expr::constant(sys.A(i, j)) * Expr::var(j);
        }
        sys.g.exprs.push_back(sys.f.exprs[i] - ax);
    }
    sys.Dg.assign(n, std::vector<Expr>(n));
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j)
            sys.Dg[i][j] = Df[i][j] - Expr::constant(sys.A(i, j));

    sys.Q = (options.Q.rows() == ni && options.Q.cols() == ni) ? options.Q
                                                               : Matrix::identity(ni);
    sys.hurwitz = is_hurwitz(sys.A);
    if (sys.hurwitz) sys.P = lyapunov_solve(sys.A, sys.Q);
    return sys;
}

Expr lie_derivative(const Expr& V, const DynamicalSystem& sys) {
    Expr out = Expr::constant(0.0);
    for (std::size_t i = 0; i < sys.dim(); ++i)
        out = out + V.differentiate(static_cast<int>(i)) * sys.f.exprs[i];
    return out;
}

}  // namespace roa
