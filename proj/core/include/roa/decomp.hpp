#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "roa/options.hpp"
#include "roa/system.hpp"

namespace roa {

struct NotHurwitzBlock : std::runtime_error {
    int block;
    explicit NotHurwitzBlock(int b)
        : std::runtime_error("block " + std::to_string(b) +
                             " has a non-Hurwitz sub-Jacobian"),
          block(b) {}
};

struct Block {
    std::vector<int> idx;               // state indices of this block
    Matrix A;                           // sub-Jacobian at 0 restricted to the block
    Matrix P;                           // lyapunov_solve(A, I)
    Matrix Pinv;
    VectorExpr g;                       // f_block - A*x_block; may reference foreign vars
    std::vector<std::vector<Expr>> Dg;  // |idx| rows, n cols: Jacobian of g
    double pmin;                        // lambda_min(P)
};

struct Decomposition {
    const DynamicalSystem* sys;
    std::vector<Block> blocks;
    std::vector<int> block_of;  // state index -> block number
};

Decomposition decompose(const DynamicalSystem& sys,
                        const std::vector<std::vector<int>>& block_spec);

// Max-form certificate V(x) = max_i x_bi^T P_i x_bi: largest c whose sublevel
// set lies strictly inside `domain` with every block face decrease condition
// verified. Face equality is encoded as a |V_i - c| <= delta band; foreign
// blocks are relaxed to their enclosing hyperrectangles.
double compositional_quadratic_verifier(const Decomposition& d, const Box& domain,
                                        const VerifyOptions& opts = {});

// Membership in {V <= c} for the max-form certificate.
double max_form_value(const Decomposition& d, const std::vector<double>& x);

}  // namespace roa
