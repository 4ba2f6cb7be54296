#include "doctest.h"

#include <cmath>

#include "roa/volume.hpp"
#include "systems.hpp"

using namespace roa;

namespace {
IntegrateOptions fast_opts() {
    IntegrateOptions o;
    o.rtol = 1e-6;
    o.atol = 1e-8;
    return o;
}
}  // namespace

TEST_CASE("globally attractive system: full-region fraction is 1") {
    auto sys = build_system("lin2", {"-x1", "-2*x2"}, {"x1", "x2"},
                            Box({{-2.0, 2.0}, {-2.0, 2.0}}));
    DoaSample s = simulate_doa(sys, 10000, 3, 4, fast_opts());
    CHECK(s.doa_count == 10000);
    auto full = estimate_volume(s, [](const std::vector<double>&) { return true; });
    CHECK(full.fraction == 1.0);
    CHECK(full.domain_fraction == 1.0);
    auto empty = estimate_volume(s, [](const std::vector<double>&) { return false; });
    CHECK(empty.fraction == 0.0);
    CHECK(empty.region_count == 0);

    // half-width formula sanity on a half-space region
    auto half = estimate_volume(s, [](const std::vector<double>& x) { return x[0] < 0.0; });
    CHECK(half.fraction == doctest::Approx(0.5).epsilon(0.05));
    double p = half.fraction;
    CHECK(half.half_width ==
          doctest::Approx(1.96 * std::sqrt(p * (1 - p) / 10000)).epsilon(1e-12));
}

TEST_CASE("vdp quadratic region is a proper subset of the simulated DOA") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    DoaSample s = simulate_doa(sys, 10000, 11, 4, fast_opts());
    CHECK(s.doa_count > 0);
    CHECK(s.doa_count < 10000);  // corners outside the DOA escape the domain
    Expr VP = quadratic_form_expr(sys.P);
    const double c = 0.8;
    auto est = estimate_volume(s, [&](const std::vector<double>& x) {
        return VP.eval(x) <= c;
    });
    CHECK(est.fraction > 0.0);
    CHECK(est.fraction < 1.0);
    // every point of a verified sublevel region converges
    for (std::size_t i = 0; i < s.points.size(); ++i)
        if (VP.eval(s.points[i]) <= c) CHECK(s.in_doa[i] == 1);
}

TEST_CASE("degenerate reference") {
    auto sys = build_system("unstable", {"x1", "x2"}, {"x1", "x2"},
                            Box({{-1.0, 1.0}, {-1.0, 1.0}}));
    DoaSample s = simulate_doa(sys, 10000, 5, 4, fast_opts());
    CHECK(s.doa_count == 0);
    CHECK_THROWS_AS(estimate_volume(s, [](const std::vector<double>&) { return true; }),
                    DegenerateReference);
}

TEST_CASE("sample determinism across worker counts") {
    auto sys = build_system("lin1", {"-x1"}, {"x1"}, Box({{-1.0, 1.0}}));
    DoaSample a = simulate_doa(sys, 10000, 21, 1, fast_opts());
    DoaSample b = simulate_doa(sys, 10000, 21, 4, fast_opts());
    CHECK(a.points == b.points);
    CHECK(a.in_doa == b.in_doa);
    CHECK_THROWS_AS(simulate_doa(sys, 5000, 1, 1), std::invalid_argument);
}
