#include <cmath>
#include <random>

#include "doctest.h"
#include "roa/prover.hpp"

using namespace roa;

namespace {

const std::vector<std::string> kX{"x1"};

std::shared_ptr<const ScalarFn> fn(const std::string& text,
                                   const std::vector<std::string>& vars = kX,
                                   bool grad = false) {
    return std::make_shared<ExprFn>(parse_expr(text, vars), grad);
}

}  // namespace

TEST_CASE("check: simple goals on an interval") {
    Query q;
    q.domain = Box({{-1.0, 1.0}});

    q.goal = fn("x1^2 - 2");
    CHECK(check(q).verified());  // sup x^2 = 1 < 2

    q.goal = fn("x1^2 - 0.5");
    Verdict v = check(q);
    CHECK(v.status == VerdictStatus::Refuted);
    REQUIRE(v.witness.size() == 1);
    CHECK(std::fabs(v.witness[0]) > 0.7071);
    CHECK(v.witness_goal_value > 0.0);
}

TEST_CASE("check: infeasible premise makes any goal vacuous") {
    Query q;
    q.domain = Box({{-1.0, 1.0}});
    q.premises.push_back(fn("x1 - (-2)"));  // x1 <= -2, impossible on [-1,1]
    q.goal = fn("1 + 0*x1");                // always violated if reachable
    CHECK(check(q).verified());
}

TEST_CASE("check: premise-restricted goal") {
    Query q;
    q.domain = Box({{-1.0, 1.0}});
    q.premises.push_back(fn("x1^2 - 0.25"));  // |x1| <= 0.5 (+delta)
    q.goal = fn("x1^2 - 0.3");
    CHECK(check(q).verified());
}

TEST_CASE("check_with_mean_value agrees with check") {
    // differential-testing oracle over a small corpus
    std::vector<std::string> goals{
        "x1^2 - 2", "x1^2 - 0.5", "sin(x1) - x1 - 1", "tanh(x1) - 0.99",
        "x1^4 - x1^2 - 0.1", "cos(x1) - 1.0001",
    };
    for (const auto& g : goals) {
        Query q;
        q.domain = Box({{-1.0, 1.0}});
        q.goal = fn(g, kX, true);
        CHECK(check(q).status == check_with_mean_value(q).status);
    }
}

TEST_CASE("check_with_mean_value: quadratic and sine bounds") {
    Query q;
    q.domain = Box({{0.4, 0.6}});
    q.goal = fn("x1^2 - x1 - 0.26", kX, true);
    CHECK(check_with_mean_value(q).verified());
    CHECK(check(q).verified());

    Query s;
    s.domain = Box({{0.0, 1.0}});
    s.goal = fn("sin(x1) - x1", kX, true);
    CHECK(check_with_mean_value(s).verified());
}

TEST_CASE("determinism: identical query gives identical verdict") {
    Query q;
    q.domain = Box({{-1.0, 1.0}, {-1.0, 1.0}});
    q.goal = fn("x1^2 + x2^2 - 1.7", {"x1", "x2"});
    Verdict a = check(q);
    Verdict b = check(q);
    CHECK(a.status == b.status);
    CHECK(a.boxes_processed == b.boxes_processed);
}

TEST_CASE("jobs do not change the verdict") {
    Query q;
    q.domain = Box({{-2.0, 2.0}, {-2.0, 2.0}});
    q.goal = fn("x1^2 + 0.5*x2^2 - 6.2", {"x1", "x2"});
    Verdict seq = check(q);
    q.jobs = 4;
    Verdict par = check(q);
    CHECK(seq.status == par.status);
    CHECK(seq.verified());
}

TEST_CASE("budget exhaustion reported") {
    Query q;
    q.domain = Box({{-1.0, 1.0}, {-1.0, 1.0}});
    // dependency-heavy rewrite of a true bound: the natural extension is
    // loose, so the search must refine far below a 5-box budget
    q.goal = fn("(x1+x2)^2 - 2*x1*x2 - x1^2 - x2^2 - 0.000001", {"x1", "x2"});
    q.budget = 5;
    CHECK_THROWS_AS(check(q), ResourceExhausted);
}

TEST_CASE("soundness sampling on verified queries") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Query q;
    q.domain = Box({{-1.0, 1.0}, {-1.0, 1.0}});
    q.premises.push_back(fn("x1^2 + x2^2 - 0.81", {"x1", "x2"}));
    q.goal = fn("x1*x2 - 0.5", {"x1", "x2"});
    REQUIRE(check(q).verified());
    for (int i = 0; i < 100000; ++i) {
        std::vector<double> p{u(rng), u(rng)};
        if (p[0] * p[0] + p[1] * p[1] - 0.81 <= q.delta)
            CHECK(p[0] * p[1] - 0.5 <= 0.0);
    }
}

TEST_CASE("refuted witness replays") {
    Query q;
    q.domain = Box({{-1.0, 1.0}});
    q.premises.push_back(fn("x1 - 0.9"));  // x1 <= 0.9
    q.goal = fn("x1 - 0.5");
    Verdict v = check(q);
    REQUIRE(v.status == VerdictStatus::Refuted);
    CHECK(v.witness[0] - 0.9 <= q.delta);
    CHECK(v.witness[0] - 0.5 > 0.0);
    CHECK(v.witness_goal_value == doctest::Approx(v.witness[0] - 0.5));
}

TEST_CASE("bisect_level basic families") {
    // family always verified on [0, 8]: report 8 - O(tol)
    double full = bisect_level([](double) { return true; }, 0.0, 8.0, 1e-5);
    CHECK(full > 8.0 - 1e-4);
    CHECK(full < 8.0);

    // threshold family: verified iff c <= 0.5
    double thr = bisect_level([](double c) { return c <= 0.5; }, 0.0, 5.0, 1e-5);
    CHECK(thr == doctest::Approx(0.5).epsilon(1e-4));

    CHECK_THROWS_AS(bisect_level([](double) { return false; }, 0.0, 1.0, 1e-5), NoLevel);
}

TEST_CASE("bisect_level with prover queries: 10-d sublevel containment") {
    // largest c with {0.5 ||x||^2 <= c} inside [-1,1]^10, via face-slab
    // queries: on each slab next to a face, 0.5 ||x||^2 > c must hold
    const int n = 10;
    std::vector<std::string> vars;
    for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
    std::string vsq = "0.5*(";
    for (int i = 0; i < n; ++i) vsq += (i ? " + " : "") + vars[i] + "^2";
    vsq += ")";

    auto contained = [&](double c) {
        for (int d = 0; d < n; ++d) {
            for (int side = 0; side < 2; ++side) {
                Query q;
                q.domain = Box::uniform(n, -1.0, 1.0);
                const double m = 2e-6;  // one min_width of margin
                if (side == 0) q.domain[d] = Interval(1.0 - m, 1.0);
                else q.domain[d] = Interval(-1.0, -1.0 + m);
                // margin the goal by delta: Verified certifies goal <= delta,
                // so c + delta - V <= delta gives the hard bound V >= c
                q.goal = std::make_shared<ExprFn>(
                    Expr::constant(c + q.delta) - parse_expr(vsq, vars));
                if (!check(q).verified()) return false;
            }
        }
        return true;
    };
    double c = bisect_level(contained, 0.0, 5.0, 1e-5);
    CHECK(c == doctest::Approx(0.49999).epsilon(2e-4));
    CHECK(c < 0.5);
}
