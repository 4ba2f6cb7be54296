#include <benchmark/benchmark.h>

#include "roa/expr.hpp"

using namespace roa;

static void BM_EvalInterval(benchmark::State& state) {
    auto e = parse_expr("x1 - (1 - x1^2)*x2", {"x1", "x2"});
    Box b({{-1.0, 1.0}, {-2.0, 2.0}});
    for (auto _ : state) benchmark::DoNotOptimize(e.eval_interval(b));
}
BENCHMARK(BM_EvalInterval);

static void BM_EvalPoint(benchmark::State& state) {
    auto e = parse_expr("x1 - (1 - x1^2)*x2", {"x1", "x2"});
    std::vector<double> p{0.3, -1.2};
    for (auto _ : state) benchmark::DoNotOptimize(e.eval(p));
}
BENCHMARK(BM_EvalPoint);
