#pragma once

#include "roa/options.hpp"
#include "roa/system.hpp"

namespace roa {

// Enlarges the verified quadratic level from c1_P to the largest c2 >= c1_P
// with V_P decreasing on the annulus {c1_P <= x^T P x <= c2} (within X) and
// {x^T P x <= c2} strictly inside X. Falls back to c1_P when no larger
// level verifies.
double quadratic_reach_verifier(const DynamicalSystem& sys, double c1_P,
                                const VerifyOptions& opts = {});

}  // namespace roa
