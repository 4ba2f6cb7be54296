#include "doctest.h"

#include <random>

#include "roa/decomp.hpp"
#include "systems.hpp"

using namespace roa;

TEST_CASE("decompose: 10-d system, 5x2 blocks") {
    auto sys = make_10d(10.0);
    auto d = decompose(sys, blocks_5x2());
    REQUIRE(d.blocks.size() == 5);
    for (const auto& blk : d.blocks) {
        CHECK(blk.A(0, 0) == doctest::Approx(-1.0));
        CHECK(blk.A(0, 1) == doctest::Approx(0.5));
        CHECK(blk.A(1, 0) == doctest::Approx(-0.5));
        CHECK(blk.A(1, 1) == doctest::Approx(-1.0));
        CHECK(blk.P(0, 0) == doctest::Approx(0.5));
        CHECK(blk.P(0, 1) == doctest::Approx(0.0));
        CHECK(blk.P(1, 1) == doctest::Approx(0.5));
        CHECK(blk.pmin == doctest::Approx(0.5));
    }
    // interconnections are the pure quadratic couplings
    std::vector<double> x(10);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (auto& v : x) v = u(rng);
    CHECK(d.blocks[0].g.exprs[0].eval(x) == doctest::Approx(-0.1 * x[8] * x[8]));
    CHECK(d.blocks[0].g.exprs[1].eval(x) == doctest::Approx(0.0));
    CHECK(d.blocks[1].g.exprs[0].eval(x) == doctest::Approx(-0.1 * x[0] * x[0]));
    CHECK(d.blocks[2].g.exprs[0].eval(x) == doctest::Approx(0.1 * x[6] * x[6]));
    CHECK(d.blocks[3].g.exprs[0].eval(x) == doctest::Approx(0.0));
    CHECK(d.blocks[3].g.exprs[1].eval(x) == doctest::Approx(0.0));
    CHECK(d.blocks[4].g.exprs[1].eval(x) == doctest::Approx(0.1 * x[1] * x[1]));
}

TEST_CASE("decompose: 10-d system, 10x1 blocks keep linear couplings") {
    auto sys = make_10d(10.0);
    auto d = decompose(sys, blocks_10x1());
    REQUIRE(d.blocks.size() == 10);
    for (const auto& blk : d.blocks) {
        CHECK(blk.A(0, 0) == doctest::Approx(-1.0));
        CHECK(blk.P(0, 0) == doctest::Approx(0.5));
    }
    std::vector<double> x(10, 0.5);
    CHECK(d.blocks[1].g.exprs[0].eval(x) == doctest::Approx(-0.5 * x[0]));
    CHECK(d.blocks[0].g.exprs[0].eval(x) ==
          doctest::Approx(0.5 * x[1] - 0.1 * x[8] * x[8]));
}

TEST_CASE("decompose: reconstruction invariant") {
    auto sys = make_10d(4.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (auto spec : {blocks_10x1(), blocks_5x2()}) {
        auto d = decompose(sys, spec);
        for (int t = 0; t < 200; ++t) {
            std::vector<double> x(10);
            for (auto& v : x) v = u(rng);
            auto fx = sys.f.eval(x);
            for (const auto& blk : d.blocks) {
                for (std::size_t i = 0; i < blk.idx.size(); ++i) {
                    double ax = 0.0;
                    for (std::size_t j = 0; j < blk.idx.size(); ++j)
                        ax += blk.A(static_cast<int>(i), static_cast<int>(j)) * x[blk.idx[j]];
                    CHECK(ax + blk.g.exprs[i].eval(x) ==
                          doctest::Approx(fx[blk.idx[i]]).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("decompose: one block is the monolithic system") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    auto d = decompose(sys, {{0, 1}});
    REQUIRE(d.blocks.size() == 1);
    CHECK(d.blocks[0].A(0, 1) == doctest::Approx(sys.A(0, 1)));
    CHECK(d.blocks[0].P(0, 0) == doctest::Approx(sys.P(0, 0)));
    std::vector<double> x{0.3, -1.2};
    CHECK(d.blocks[0].g.exprs[1].eval(x) == doctest::Approx(sys.g.exprs[1].eval(x)));
}

TEST_CASE("decompose: non-Hurwitz block rejected") {
    // x1 alone is a center (A_11 = 0): splitting it off must fail
    auto sys = build_system("spiral", {"x2", "-x1 - x2"}, {"x1", "x2"},
                            Box({{-1.0, 1.0}, {-1.0, 1.0}}));
    CHECK_THROWS_AS(decompose(sys, {{0}, {1}}), NotHurwitzBlock);
}

TEST_CASE("compositional_quadratic_verifier: decoupled linear blocks") {
    // xdot_i = -x_i: containment-limited hypercube certificate
    auto sys = build_system("dec", {"-x1", "-x2"}, {"x1", "x2"},
                            Box({{-2.0, 2.0}, {-2.0, 2.0}}));
    auto d = decompose(sys, {{0}, {1}});
    double c = compositional_quadratic_verifier(d, sys.domain);
    // V_i = 0.5 x_i^2, faces at sqrt(2c) = 2 => c -> 2
    CHECK(c == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(max_form_value(d, {1.9, 0.0}) < c);
}

TEST_CASE("compositional_quadratic_verifier: coupling caps the level") {
    // xdot1 = -x1 + 0.5*x2^2: face at x1 = rho needs rho(0.5 rho^2 ... ) < 0
    auto sys = build_system("cap", {"-x1 + 0.5*x2^2", "-x2"}, {"x1", "x2"},
                            Box({{-8.0, 8.0}, {-8.0, 8.0}}));
    auto d = decompose(sys, {{0}, {1}});
    double c = compositional_quadratic_verifier(d, sys.domain);
    // face x1 = rho: rho(-rho + 0.5 rho^2) < 0 iff rho < 2 => c ~ 2
    CHECK(c == doctest::Approx(2.0).epsilon(5e-3));
}
