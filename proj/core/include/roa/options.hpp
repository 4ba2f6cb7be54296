#pragma once

#include <cstdint>

namespace roa {

// Knobs shared by the quadratic and neural verification stages.
struct VerifyOptions {
    double delta = 1e-5;
    double min_width = 1e-6;  // relative, see prover
    std::uint64_t budget = 50'000'000;
    int jobs = 1;
    // epsilon in r = lambda_min(Q) - epsilon; < 0 means 5e-4 * lambda_min(Q)
    double epsilon = -1.0;
    // bisection tolerance on level constants, relative to max(1, hi)
    double bisect_tol = 1e-5;
};

}  // namespace roa
