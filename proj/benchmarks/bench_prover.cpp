#include <benchmark/benchmark.h>

#include "roa/prover.hpp"

using namespace roa;

static void BM_CheckEllipse(benchmark::State& state) {
    Query q;
    q.domain = Box({{-2.0, 2.0}, {-2.0, 2.0}});
    q.goal = std::make_shared<ExprFn>(
        parse_expr("x1^2 + x1*x2 + x2^2 - 12.2", {"x1", "x2"}));
    for (auto _ : state) benchmark::DoNotOptimize(check(q));
}
BENCHMARK(BM_CheckEllipse);

BENCHMARK_MAIN();
