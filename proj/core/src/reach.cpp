#include "roa/reach.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "roa/local.hpp"
#include "roa/prover.hpp"

namespace roa {

double quadratic_reach_verifier(const DynamicalSystem& sys, double c1_P,
                                const VerifyOptions& opts) {
    if (!(c1_P > 0.0))
        throw std::invalid_argument("quadratic_reach_verifier requires c1_P > 0");
    Expr V = quadratic_form_expr(sys.P);
    Expr Vdot = lie_derivative(V, sys);

    auto verified_at = [&](double c2) {
        if (!sublevel_in_interior(V, sys.domain, c2, opts)) return false;
        Query q;
        q.domain = sys.domain;
        q.delta = opts.delta;
        q.min_width = opts.min_width;
        q.budget = opts.budget;
        q.jobs = opts.jobs;
        q.premises.push_back(std::make_shared<ExprFn>(Expr::constant(c1_P) - V));
        q.premises.push_back(std::make_shared<ExprFn>(V - Expr::constant(c2)));
        q.goal = std::make_shared<ExprFn>(Vdot + Expr::constant(1e-4 * c2));
        return check(q).verified();
    };

    double hi = V.eval_interval(sys.domain).hi;
    double tol = opts.bisect_tol * std::max(1.0, hi);
    try {
        return std::max(c1_P, bisect_level(verified_at, c1_P, hi, tol));
    } catch (const NoLevel&) {
        return c1_P;  // stage degenerates, target stays the local level
    }
}

}  // namespace roa
