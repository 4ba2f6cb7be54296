#include "doctest.h"

#include <random>

#include "roa/local.hpp"
#include "roa/reach.hpp"
#include "roa/zubovdata.hpp"
#include "systems.hpp"

using namespace roa;

TEST_CASE("reach: linear scalar is containment-limited near 0.5") {
    auto sys = build_system("lin", {"-x1"}, {"x1"}, Box({{-1.0, 1.0}}));
    double c2 = quadratic_reach_verifier(sys, 0.01);
    CHECK(c2 == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(c2 < 0.5);
}

TEST_CASE("reach: nesting and decrease on the van der Pol annulus") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    auto local = local_stability_verifier(sys);
    REQUIRE(local.level > 0.0);
    double c2 = quadratic_reach_verifier(sys, local.level);
    CHECK(c2 >= local.level);
    CHECK(c2 > local.level * 1.5);  // the reach stage actually enlarges the ROA

    Expr V = quadratic_form_expr(sys.P);
    Expr Vdot = lie_derivative(V, sys);
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u1(-2.5, 2.5), u2(-3.5, 3.5);
    int hits = 0;
    for (int i = 0; i < 100000; ++i) {
        std::vector<double> x{u1(rng), u2(rng)};
        double v = V.eval(x);
        if (v < local.level || v > c2) continue;
        ++hits;
        CHECK(Vdot.eval(x) < 0.0);
    }
    CHECK(hits > 0);
}

TEST_CASE("reach: trajectories from the reach region converge") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    auto local = local_stability_verifier(sys);
    double c2 = quadratic_reach_verifier(sys, local.level);
    Expr V = quadratic_form_expr(sys.P);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u1(-2.5, 2.5), u2(-3.5, 3.5);
    int done = 0;
    while (done < 200) {
        std::vector<double> x{u1(rng), u2(rng)};
        if (V.eval(x) > c2) continue;
        ++done;
        auto tr = integrate(sys, x, 0.1);
        CHECK(tr.classification == TrajClass::Converged);
    }
}

TEST_CASE("reach: degenerate target falls back to c1") {
    // xdot = -x + x^3 on [-2,2]: DOA is (-1,1); V = 0.5 x^2 cannot reach far
    auto sys = build_system("cubic", {"-x1 + x1^3"}, {"x1"}, Box({{-2.0, 2.0}}));
    auto local = local_stability_verifier(sys);
    REQUIRE(local.level > 0.0);
    double c2 = quadratic_reach_verifier(sys, local.level);
    CHECK(c2 >= local.level);
    // Vdot = -x^2 + x^4 >= 0 at |x| >= 1: level must stay below 0.5
    CHECK(c2 < 0.5);
}
