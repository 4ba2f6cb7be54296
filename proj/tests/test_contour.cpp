#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "roa/contour.hpp"

using namespace roa;

TEST_CASE("unit circle oracle") {
    Box dom({{-2.0, 2.0}, {-2.0, 2.0}});
    auto sets = extract_contours(
        [](double x, double y) { return x * x + y * y; }, dom, {1.0}, 400);
    REQUIRE(sets.size() == 1);
    REQUIRE(sets[0].lines.size() == 1);
    const Polyline& c = sets[0].lines[0];
    CHECK(c.closed);
    CHECK(c.pts.size() > 100);
    double cell = 4.0 / 400;
    double bound = 2.0 * std::sqrt(2.0) * cell;
    double worst = 0.0;
    for (const auto& p : c.pts)
        worst = std::max(worst, std::abs(std::hypot(p[0], p[1]) - 1.0));
    CHECK(worst < bound);
}

TEST_CASE("level above the maximum yields no polylines") {
    Box dom({{-2.0, 2.0}, {-2.0, 2.0}});
    auto sets = extract_contours(
        [](double x, double y) { return x * x + y * y; }, dom, {100.0}, 50);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].lines.empty());
}

TEST_CASE("open contour spans the domain") {
    Box dom({{-1.0, 1.0}, {-1.0, 1.0}});
    auto sets = extract_contours([](double x, double) { return x; }, dom, {0.25}, 64);
    REQUIRE(sets[0].lines.size() == 1);
    const Polyline& line = sets[0].lines[0];
    CHECK_FALSE(line.closed);
    for (const auto& p : line.pts) CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-9));
    double ylo = 1.0, yhi = -1.0;
    for (const auto& p : line.pts) {
        ylo = std::min(ylo, p[1]);
        yhi = std::max(yhi, p[1]);
    }
    CHECK(ylo < -0.95);
    CHECK(yhi > 0.95);
}

TEST_CASE("dimension errors") {
    CHECK_THROWS_AS(extract_contours([](double, double) { return 0.0; },
                                     Box({{0.0, 1.0}}), {0.5}),
                    DimensionError);
    CHECK_THROWS_AS(write_contours_svg({}, Box({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}), "x.svg"),
                    DimensionError);
}

TEST_CASE("csv and svg outputs") {
    Box dom({{-2.0, 2.0}, {-2.0, 2.0}});
    auto f = [](double x, double y) { return x * x + y * y; };
    export_contours(f, dom, {0.5, 1.0}, 100, "contour_test.csv", "contour_test.svg");

    std::ifstream csv("contour_test.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "level,polyline,x,y");
    int rows = 0;
    while (std::getline(csv, line)) {
        double level, x, y;
        int poly;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%lf,%lf", &level, &poly, &x, &y) == 4);
        CHECK((level == 0.5 || level == 1.0));
        CHECK(std::abs(f(x, y) - level) < 0.05);
        ++rows;
    }
    CHECK(rows > 100);

    std::ifstream svg("contour_test.svg");
    std::stringstream ss;
    ss << svg.rdbuf();
    std::string body = ss.str();
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("<path") != std::string::npos);
    CHECK(body.find("<rect") != std::string::npos);
    std::remove("contour_test.csv");
    std::remove("contour_test.svg");
}
