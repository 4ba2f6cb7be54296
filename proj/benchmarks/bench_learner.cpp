#include <benchmark/benchmark.h>

#include <random>

#include "roa/learner.hpp"
#include "roa/neuralverify.hpp"
#include "roa/system.hpp"

using namespace roa;

namespace {

DynamicalSystem vdp() {
    return build_system("vdp", {"-x2", "x1 - (1 - x1^2)*x2"}, {"x1", "x2"},
                        Box({{-2.5, 2.5}, {-3.5, 3.5}}));
}

}  // namespace

static void BM_NetForward(benchmark::State& state) {
    MlpNet net = init_net({2, 30, 30, 1}, 0.1, 5);
    std::vector<double> x{0.7, -1.1};
    for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_NetForward);

static void BM_LossAndGrad32(benchmark::State& state) {
    auto sys = vdp();
    MlpNet net = init_net({2, 30, 30, 1}, 0.1, 5);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::vector<double>> colloc;
    std::vector<Dataset::Point> data;
    for (int i = 0; i < 32; ++i) {
        colloc.push_back({u(rng), u(rng)});
        data.push_back({{u(rng), u(rng)}, 0.5});
    }
    TrainConfig tc;
    NetGrads g(net);
    for (auto _ : state)
        benchmark::DoNotOptimize(loss_and_grad(net, sys, colloc, data, tc, g));
}
BENCHMARK(BM_LossAndGrad32);

static void BM_NetIntervalEnclosure(benchmark::State& state) {
    MlpNet net = init_net({2, 30, 30, 1}, 0.1, 5);
    Box b({{0.3, 0.5}, {-1.2, -0.9}});
    for (auto _ : state) benchmark::DoNotOptimize(net_interval(net, b));
}
BENCHMARK(BM_NetIntervalEnclosure);

static void BM_NetLieEnclosure(benchmark::State& state) {
    auto sys = vdp();
    MlpNet net = init_net({2, 30, 30, 1}, 0.1, 5);
    Box b({{0.3, 0.5}, {-1.2, -0.9}});
    for (auto _ : state)
        benchmark::DoNotOptimize(net_lie_interval(net, sys, b));
}
BENCHMARK(BM_NetLieEnclosure);

static void BM_Integrate(benchmark::State& state) {
    auto sys = vdp();
    std::vector<double> x0{1.2, -0.4};
    for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, x0, 0.1));
}
BENCHMARK(BM_Integrate);
