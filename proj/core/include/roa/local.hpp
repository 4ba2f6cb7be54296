#pragma once

#include "roa/decomp.hpp"
#include "roa/options.hpp"
#include "roa/system.hpp"

namespace roa {

struct LocalResult {
    bool globally_stable = false;
    double level = 0.0;  // c1_P; meaningless when globally_stable
};

// Mean-value-theorem bound 2||P Dg(x)||_F <= r, r = lambda_min(Q) - epsilon.
// First attempts the global check on a +-1e6 box (guarded by a symbolic
// boundedness screen on the goal); otherwise bisects the largest c with the
// bound holding on {x^T P x <= c} and that sublevel set strictly inside X.
LocalResult local_stability_verifier(const DynamicalSystem& sys,
                                     const VerifyOptions& opts = {});

// Compositional variant: encloses the ellipsoid in the hyperrectangle
// |x_i| <= sqrt(c / lambda_min(P)) and checks per-block conditions
// 2||P_b L_b||_F + 2||P_b (Dg_b(x) - L_b)||_F <= r by independent interval
// evaluation of each entry, where L_b = Dg_b(0) is the constant linear
// coupling part.
double compositional_local_stability_verifier(const DynamicalSystem& sys,
                                              const Decomposition& d,
                                              const VerifyOptions& opts = {});

// Largest c with {V <= c} in the interior of X (margin one min_width per
// face), decided by face-slab prover queries; used by the quadratic and
// neural stages. V must depend on every dimension of X.
bool sublevel_in_interior(const Expr& V, const Box& X, double c,
                          const VerifyOptions& opts);

double effective_epsilon(const DynamicalSystem& sys, const VerifyOptions& opts);

}  // namespace roa
