#include "roa/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "roa/prover.hpp"

namespace roa {

Decomposition decompose(const DynamicalSystem& sys,
                        const std::vector<std::vector<int>>& block_spec) {
    const int n = static_cast<int>(sys.dim());
    std::vector<int> block_of(n, -1);
    for (std::size_t b = 0; b < block_spec.size(); ++b) {
        for (int k : block_spec[b]) {
            if (k < 0 || k >= n || block_of[k] != -1)
                throw std::invalid_argument("block_spec is not a partition of the state indices");
            block_of[k] = static_cast<int>(b);
        }
    }
    if (std::count(block_of.begin(), block_of.end(), -1) != 0)
        throw std::invalid_argument("block_spec leaves state indices unassigned");

    Decomposition d;
    d.sys = &sys;
    d.block_of = std::move(block_of);
    for (std::size_t b = 0; b < block_spec.size(); ++b) {
        Block blk;
        blk.idx = block_spec[b];
        const int m = static_cast<int>(blk.idx.size());
        blk.A = Matrix(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) blk.A(i, j) = sys.A(blk.idx[i], blk.idx[j]);
        if (!is_hurwitz(blk.A)) throw NotHurwitzBlock(static_cast<int>(b));
        blk.P = lyapunov_solve(blk.A, Matrix::identity(m));
        blk.Pinv = spd_inverse(blk.P);
        blk.pmin = min_eigenvalue_sym(blk.P);
        blk.g.vars = sys.f.vars;
        for (int i = 0; i < m; ++i) {
            Expr ax = Expr::constant(0.0);
            for (int j = 0; j < m; ++j)
                ax = ax + Expr::constant(blk.A(i, j)) * Expr::var(blk.idx[j]);
            blk.g.exprs.push_back(sys.f.exprs[blk.idx[i]] - ax);
        }
        for (int i = 0; i < m; ++i) {
            std::vector<Expr> row;
            for (int j = 0; j < n; ++j) row.push_back(blk.g.exprs[i].differentiate(j));
            blk.Dg.push_back(std::move(row));
        }
        d.blocks.push_back(std::move(blk));
    }
    return d;
}

namespace {

// x_b^T P_b x_b over the full-state variables.
Expr block_quadratic(const Block& blk) {
    Expr v = Expr::constant(0.0);
    const int m = static_cast<int>(blk.idx.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            v = v + Expr::constant(blk.P(i, j)) * Expr::var(blk.idx[i]) * Expr::var(blk.idx[j]);
    return v;
}

// Enclosing hyperrectangle of {V <= c} intersected with the domain:
// |x_k| <= sqrt(c * (P_b^-1)_kk) for the block that owns k.
Box level_hyperrect(const Decomposition& d, const Box& domain, double c) {
    Box h = domain;
    for (const Block& blk : d.blocks) {
        for (std::size_t i = 0; i < blk.idx.size(); ++i) {
            int k = blk.idx[i];
            double hw = std::sqrt(std::max(0.0, c) * blk.Pinv(static_cast<int>(i), static_cast<int>(i)));
            h[k].lo = std::max(h[k].lo, -hw);
            h[k].hi = std::min(h[k].hi, hw);
        }
    }
    return h;
}

}  // namespace

double max_form_value(const Decomposition& d, const std::vector<double>& x) {
    double best = 0.0;
    for (const Block& blk : d.blocks) {
        double v = 0.0;
        const int m = static_cast<int>(blk.idx.size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) v += blk.P(i, j) * x[blk.idx[i]] * x[blk.idx[j]];
        best = std::max(best, v);
    }
    return best;
}

double compositional_quadratic_verifier(const Decomposition& d, const Box& domain,
                                        const VerifyOptions& opts) {
    const DynamicalSystem& sys = *d.sys;
    const int n = static_cast<int>(sys.dim());

    std::vector<Expr> V, Vdot;
    for (const Block& blk : d.blocks) {
        Expr v = block_quadratic(blk);
        Expr vd = Expr::constant(0.0);
        for (int k : blk.idx) vd = vd + v.differentiate(k) * sys.f.exprs[k];
        V.push_back(v);
        Vdot.push_back(vd);
    }

    // sublevel set strictly inside the domain, margin one min_width per face;
    // the ellipsoid support function makes this exact
    auto contained = [&](double c) {
        for (const Block& blk : d.blocks) {
            for (std::size_t i = 0; i < blk.idx.size(); ++i) {
                int k = blk.idx[i];
                double hw = std::sqrt(c * blk.Pinv(static_cast<int>(i), static_cast<int>(i)));
                double margin = opts.min_width * domain[k].width();
                if (hw > domain[k].hi - margin || -hw < domain[k].lo + margin) return false;
            }
        }
        return true;
    };

    auto faces_decrease = [&](double c) {
        Box h = level_hyperrect(d, domain, c);
        for (std::size_t b = 0; b < d.blocks.size(); ++b) {
            const Block& blk = d.blocks[b];
            Query q;
            q.domain = h;
            q.delta = opts.delta;
            q.min_width = opts.min_width;
            q.budget = opts.budget;
            q.jobs = opts.jobs;
            q.goal = std::make_shared<ExprFn>(Vdot[b] + Expr::constant(1e-4 * c));
            if (blk.idx.size() == 1) {
                // scalar block: the face {V_b = c} is two exact points, so
                // pin the coordinate instead of grinding a thin premise band
                int k = blk.idx[0];
                double face = std::sqrt(c / blk.P(0, 0));
                for (double s : {-1.0, 1.0}) {
                    q.domain = h;
                    q.domain[k].lo = q.domain[k].hi = s * face;
                    if (!check(q).verified()) return false;
                }
                continue;
            }
            // face equality as a |V_b - c| <= delta band
            q.premises.push_back(std::make_shared<ExprFn>(V[b] - Expr::constant(c)));
            q.premises.push_back(std::make_shared<ExprFn>(Expr::constant(c) - V[b]));
            if (!check(q).verified()) return false;
        }
        return true;
    };

    double hi = 0.0;
    for (std::size_t b = 0; b < d.blocks.size(); ++b)
        hi = std::max(hi, V[b].eval_interval(domain).hi);
    double tol = opts.bisect_tol * std::max(1.0, hi);
    return bisect_level([&](double c) { return contained(c) && faces_decrease(c); },
                        0.0, hi, tol);
}

}  // namespace roa
