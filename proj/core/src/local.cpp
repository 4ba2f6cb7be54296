#include "roa/local.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "roa/prover.hpp"

namespace roa {

double effective_epsilon(const DynamicalSystem& sys, const VerifyOptions& opts) {
    if (opts.epsilon >= 0.0) return opts.epsilon;
    return 5e-4 * min_eigenvalue_sym(sys.Q);
}

namespace {

// 2||P Dg(x)||_F <= r in the squared form 4 * sum_ij (P Dg)_ij^2 - r^2 <= 0
// (no sqrt: outward rounding can nudge a sum of squares below zero).
Expr frobenius_goal(const Matrix& P, const std::vector<std::vector<Expr>>& Dg, double r) {
    const int n = P.rows();
    Expr s = Expr::constant(0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Expr e = Expr::constant(0.0);
            for (int k = 0; k < n; ++k) e = e + Expr::constant(P(i, k)) * Dg[k][j];
            s = s + Expr::pow(e, 2);
        }
    }
    return Expr::constant(4.0) * s - Expr::constant(r * r);
}

}  // namespace

bool sublevel_in_interior(const Expr& V, const Box& X, double c,
                          const VerifyOptions& opts) {
    for (std::size_t d = 0; d < X.dims.size(); ++d) {
        double m = opts.min_width * X[d].width();
        for (int side = 0; side < 2; ++side) {
            Query q;
            q.domain = X;
            if (side == 0) q.domain[d] = Interval(X[d].hi - m, X[d].hi);
            else q.domain[d] = Interval(X[d].lo, X[d].lo + m);
            q.delta = opts.delta;
            q.min_width = opts.min_width;
            q.budget = opts.budget;
            q.jobs = opts.jobs;
            // margin the goal by delta: Verified certifies goal <= delta,
            // so c + delta - V <= delta gives the hard bound V >= c
            q.goal = std::make_shared<ExprFn>(Expr::constant(c + q.delta) - V);
            if (!check(q).verified()) return false;
        }
    }
    return true;
}

LocalResult local_stability_verifier(const DynamicalSystem& sys,
                                     const VerifyOptions& opts) {
    if (!sys.hurwitz)
        throw std::invalid_argument("local_stability_verifier requires a Hurwitz linearization");
    const int n = static_cast<int>(sys.dim());
    double r = min_eigenvalue_sym(sys.Q) - effective_epsilon(sys, opts);
    Expr goal = frobenius_goal(sys.P, sys.Dg, r);

    // global check: the bound over a whole-space stand-in box, attempted
    // only when the goal provably stays bounded over the reals
    if (goal.bounded_over_reals()) {
        Query q;
        q.domain = Box::uniform(n, -1e6, 1e6);
        q.delta = opts.delta;
        q.min_width = opts.min_width;
        q.budget = opts.budget;
        q.jobs = opts.jobs;
        q.goal = std::make_shared<ExprFn>(goal);
        if (check(q).verified()) return {true, 0.0};
    }

    Expr V = quadratic_form_expr(sys.P);
    auto verified_at = [&](double c) {
        if (!sublevel_in_interior(V, sys.domain, c, opts)) return false;
        Query q;
        q.domain = sys.domain;
        q.delta = opts.delta;
        q.min_width = opts.min_width;
        q.budget = opts.budget;
        q.jobs = opts.jobs;
        q.premises.push_back(std::make_shared<ExprFn>(V - Expr::constant(c)));
        q.goal = std::make_shared<ExprFn>(goal);
        return check(q).verified();
    };
    double hi = V.eval_interval(sys.domain).hi;
    double tol = opts.bisect_tol * std::max(1.0, hi);
    return {false, bisect_level(verified_at, 0.0, hi, tol)};
}

double compositional_local_stability_verifier(const DynamicalSystem& sys,
                                              const Decomposition& d,
                                              const VerifyOptions& opts) {
    const int n = static_cast<int>(sys.dim());
    // blocks are certified against Q = I
    double eps = opts.epsilon >= 0.0 ? opts.epsilon : 5e-4;
    double r = 1.0 - eps;

    double pmin = d.blocks.front().pmin;
    for (const Block& blk : d.blocks) pmin = std::min(pmin, blk.pmin);

    // hyperrectangle containment: sqrt(c/pmin) within every face, margin
    // one min_width
    double c_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        double m = opts.min_width * sys.domain[k].width();
        double side = std::min(sys.domain[k].hi - m, -(sys.domain[k].lo + m));
        if (side <= 0.0) throw NoLevel();
        c_max = std::min(c_max, pmin * side * side);
    }

    // per-block constant coupling L_b = Dg_b(0) and the varying remainder
    std::vector<double> const_part(d.blocks.size());
    std::vector<std::vector<std::vector<Expr>>> rem(d.blocks.size());
    std::vector<double> origin(static_cast<std::size_t>(n), 0.0);
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        const Block& blk = d.blocks[b];
        const int m = static_cast<int>(blk.idx.size());
        double sq = 0.0;
        for (int i = 0; i < m; ++i) {
            std::vector<Expr> row;
            for (int j = 0; j < n; ++j) {
                Expr e = Expr::constant(0.0);
                double l = 0.0;
                for (int k = 0; k < m; ++k) {
                    double lkj = blk.Dg[k][j].eval(origin);
                    l += blk.P(i, k) * lkj;
                    e = e + Expr::constant(blk.P(i, k)) *
                            (blk.Dg[k][j] - Expr::constant(lkj));
                }
                sq += l * l;
                row.push_back(e);
            }
            rem[b].push_back(std::move(row));
        }
        const_part[b] = 2.0 * std::sqrt(sq);
    }

    auto verified_at = [&](double c) {
        double hw = std::sqrt(c / pmin);
        Box h = sys.domain;
        for (int k = 0; k < n; ++k) {
            h[k].lo = std::max(h[k].lo, -hw);
            h[k].hi = std::min(h[k].hi, hw);
        }
        for (std::size_t b = 0; b < d.blocks.size(); ++b) {
            // each entry interval-evaluated independently over the
            // hyperrectangle (the compositional relaxation)
            double sq = 0.0;
            for (const auto& row : rem[b])
                for (const Expr& e : row) sq += ipow(e.eval_interval(h), 2).hi;
            if (const_part[b] + 2.0 * std::sqrt(sq) > r) return false;
        }
        return true;
    };
    double tol = opts.bisect_tol * std::max(1.0, c_max);
    return bisect_level(verified_at, 0.0, c_max, tol);
}

}  // namespace roa
