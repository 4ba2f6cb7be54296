#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "roa/learner.hpp"
#include "systems.hpp"

using namespace roa;

namespace {

double sqn(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

std::vector<double*> param_view(MlpNet& net) {
    std::vector<double*> p;
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        for (int i = 0; i < net.W[l].rows(); ++i)
            for (int j = 0; j < net.W[l].cols(); ++j) p.push_back(&net.W[l](i, j));
        for (auto& v : net.b[l]) p.push_back(&v);
    }
    return p;
}

std::vector<double> flat_grads(const NetGrads& g) {
    std::vector<double> out;
    for (std::size_t l = 0; l < g.W.size(); ++l) {
        for (int i = 0; i < g.W[l].rows(); ++i)
            for (int j = 0; j < g.W[l].cols(); ++j) out.push_back(g.W[l](i, j));
        for (double v : g.b[l]) out.push_back(v);
    }
    return out;
}

std::vector<std::vector<double>> sample_pts(const DynamicalSystem& sys, int count,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < count; ++i) {
        std::vector<double> x(sys.dim());
        for (std::size_t k = 0; k < sys.dim(); ++k) {
            std::uniform_real_distribution<double> d(sys.domain[k].lo, sys.domain[k].hi);
            x[k] = d(rng);
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

}  // namespace

TEST_CASE("forward basics") {
    MlpNet net = init_net({2, 8, 1}, 0.1, 7);
    // zero final layer -> identically zero output
    MlpNet zeroed = net;
    for (int j = 0; j < zeroed.W.back().cols(); ++j) zeroed.W.back()(0, j) = 0.0;
    zeroed.b.back()[0] = 0.0;
    CHECK(zeroed.forward({0.3, -1.2}) == 0.0);
    CHECK(zeroed.forward({2.0, 5.0}) == 0.0);

    // single-neuron tanh(w x + b), w=1, b=0 at x=0, output layer identity w=1
    MlpNet one;
    one.dims = {1, 1, 1};
    one.W = {Matrix(1, 1), Matrix(1, 1)};
    one.W[0](0, 0) = 1.0;
    one.W[1](0, 0) = 1.0;
    one.b = {{0.0}, {0.0}};
    CHECK(one.forward({0.0}) == 0.0);
    CHECK(one.forward({0.5}) == doctest::Approx(std::tanh(0.5)).epsilon(1e-15));

    CHECK(std::isfinite(net.forward({1e6, -1e6})));
}

TEST_CASE("input_gradient matches central differences") {
    MlpNet net = init_net({2, 30, 30, 1}, 0.1, 11);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x = {d(rng), d(rng)};
        auto g = net.input_gradient(x);
        for (int k = 0; k < 2; ++k) {
            auto xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            double fd = (net.forward(xp) - net.forward(xm)) / (2 * h);
            CHECK(std::abs(g[k] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("linear net gradient and odd symmetry") {
    MlpNet lin;
    lin.dims = {3, 1};
    lin.W = {Matrix(1, 3)};
    lin.W[0](0, 0) = 0.5;
    lin.W[0](0, 1) = -2.0;
    lin.W[0](0, 2) = 3.25;
    lin.b = {{0.7}};
    auto g = lin.input_gradient({1.0, 2.0, 3.0});
    CHECK(g[0] == 0.5);
    CHECK(g[1] == -2.0);
    CHECK(g[2] == 3.25);

    // zero biases -> odd network: W(-x) = -W(x), gradient even
    MlpNet odd = init_net({2, 10, 1}, 0.1, 5);
    for (auto& b : odd.b) std::fill(b.begin(), b.end(), 0.0);
    std::vector<double> x = {0.8, -0.3}, mx = {-0.8, 0.3};
    CHECK(odd.forward(mx) == doctest::Approx(-odd.forward(x)).epsilon(1e-14));
    auto gx = odd.input_gradient(x), gmx = odd.input_gradient(mx);
    CHECK(gmx[0] == doctest::Approx(gx[0]).epsilon(1e-12));
    CHECK(gmx[1] == doctest::Approx(gx[1]).epsilon(1e-12));
}

TEST_CASE("analytic Zubov pair has zero residual") {
    // scalar xdot = -x, W = tanh(alpha x^2 / 2): the exact PDE solution
    const double alpha = 0.25;
    auto W = [&](double x) { return std::tanh(alpha * x * x / 2.0); };
    auto dW = [&](double x) {
        double w = W(x);
        return (1.0 - w * w) * alpha * x;
    };
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        double x = d(rng);
        double w = W(x);
        double residual = dW(x) * (-x) + alpha * (1.0 + w) * x * x * (1.0 - w);
        CHECK(std::abs(residual) < 1e-12);
    }
}

TEST_CASE("zero net Zubov residual equals (alpha |x|^2)^2") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    MlpNet net = init_net({2, 8, 1}, 0.1, 1);
    for (int j = 0; j < net.W.back().cols(); ++j) net.W.back()(0, j) = 0.0;
    net.b.back()[0] = 0.0;
    TrainConfig cfg;
    cfg.alpha = 0.1;
    NetGrads g(net);
    std::vector<std::vector<double>> batch = {{1.5, -0.75}};
    auto lb = loss_and_grad(net, sys, batch, {}, cfg, g);
    double q = sqn(batch[0]);
    CHECK(lb.residual == doctest::Approx(0.1 * q * 0.1 * q).epsilon(1e-14));
    CHECK(lb.boundary == 0.0);
    CHECK(lb.data == 0.0);
}

TEST_CASE("library residual uses the positive Psi sign") {
    // cross-check loss_and_grad against the explicit formula with Psi = +alpha(1+W)|x|^2
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    MlpNet net = init_net({2, 8, 1}, 0.1, 23);
    TrainConfig cfg;
    cfg.alpha = 0.1;
    NetGrads g(net);
    for (auto& x : sample_pts(sys, 20, 9)) {
        std::vector<std::vector<double>> batch;
        batch.push_back(x);
        auto lb = loss_and_grad(net, sys, batch, {}, cfg, g);
        double w = net.forward(x);
        auto grad = net.input_gradient(x);
        auto fx = sys.f.eval(x);
        double R = grad[0] * fx[0] + grad[1] * fx[1] + cfg.alpha * (1.0 + w) * sqn(x) * (1.0 - w);
        CHECK(lb.residual == doctest::Approx(R * R).epsilon(1e-12));
    }
}

TEST_CASE("parameter gradient matches central differences in all modes") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    auto colloc = sample_pts(sys, 16, 41);
    std::vector<Dataset::Point> data;
    {
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int i = 0; i < 16; ++i)
            data.push_back({{d(rng) * 2.5, d(rng) * 3.5}, std::tanh(d(rng) + 1.0)});
    }
    for (LossMode mode : {LossMode::Zubov, LossMode::Data, LossMode::Lyapunov}) {
        for (bool sandwich : {false, true}) {
            MlpNet net = init_net({2, 8, 1}, 0.1, 77);
            TrainConfig cfg;
            cfg.loss_mode = mode;
            cfg.alpha = 0.1;
            if (sandwich) cfg.sandwich = std::make_pair(0.05, 5.0);
            NetGrads g(net);
            auto lb = loss_and_grad(net, sys, colloc, data, cfg, g);
            CHECK(lb.total >= 0.0);
            auto analytic = flat_grads(g);
            auto params = param_view(net);
            const double h = 1e-5;
            double num = 0.0, den = 0.0;
            NetGrads scratch(net);
            for (std::size_t i = 0; i < params.size(); ++i) {
                double orig = *params[i];
                *params[i] = orig + h;
                double lp = loss_and_grad(net, sys, colloc, data, cfg, scratch).total;
                *params[i] = orig - h;
                double lm = loss_and_grad(net, sys, colloc, data, cfg, scratch).total;
                *params[i] = orig;
                double fd = (lp - lm) / (2 * h);
                num += (analytic[i] - fd) * (analytic[i] - fd);
                den += fd * fd;
            }
            CHECK(std::sqrt(num) < 1e-5 * std::max(1.0, std::sqrt(den)));
        }
    }
}

TEST_CASE("train: max_epoch=0, determinism, short run improves loss") {
    auto sys = make_vdp(1.0, Box({{-2.5, 2.5}, {-3.5, 3.5}}));
    Dataset data;
    data.alpha = 0.1;
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            std::vector<double> x = {2.5 * d(rng), 3.5 * d(rng)};
            data.points.push_back({x, std::tanh(0.1 * sqn(x))});
        }
    }
    TrainConfig cfg;
    cfg.layer = 2;
    cfg.width = 10;
    cfg.num_colloc_pts = 2000;
    cfg.max_epoch = 0;
    cfg.seed = 99;

    auto r0 = train(sys, data, cfg);
    std::mt19937_64 rng(99);
    MlpNet ref = init_net({2, 10, 10, 1}, cfg.alpha, rng());
    CHECK(r0.log.empty());
    CHECK(r0.net.W[0](0, 0) == ref.W[0](0, 0));
    CHECK(r0.net.W[2](0, 5) == ref.W[2](0, 5));

    cfg.max_epoch = 6;
    auto r1 = train(sys, data, cfg);
    auto r2 = train(sys, data, cfg);
    CHECK(r1.log.size() == 6);
    for (std::size_t l = 0; l < r1.net.W.size(); ++l)
        for (int i = 0; i < r1.net.W[l].rows(); ++i)
            for (int j = 0; j < r1.net.W[l].cols(); ++j)
                CHECK(r1.net.W[l](i, j) == r2.net.W[l](i, j));
    CHECK(r1.log.back().total < r1.log.front().total);
    for (const auto& e : r1.log) CHECK(std::isfinite(e.total));
}

TEST_CASE("net serialization round trip") {
    MlpNet net = init_net({3, 7, 5, 1}, 0.2, 1234);
    net.b[1][2] = 1.0 / 3.0;
    const std::string path = "roundtrip_net.txt";
    save_net(net, path);
    MlpNet back = load_net(path);
    CHECK(back.dims == net.dims);
    CHECK(back.alpha == net.alpha);
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        for (int i = 0; i < net.W[l].rows(); ++i)
            for (int j = 0; j < net.W[l].cols(); ++j)
                CHECK(back.W[l](i, j) == net.W[l](i, j));
        for (std::size_t i = 0; i < net.b[l].size(); ++i)
            CHECK(back.b[l][i] == net.b[l][i]);
    }
    std::remove(path.c_str());
}

TEST_CASE("training log CSV format") {
    std::vector<TrainLogEntry> log = {{1, 0.5, 0.25, 0.125, 0.875}, {2, 0.1, 0.0, 0.1, 0.2}};
    const std::string path = "trainlog_test.csv";
    save_training_log(log, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,residual,boundary,data,total");
    std::getline(in, line);
    CHECK(line == "1,0.5,0.25,0.125,0.875");
    std::remove(path.c_str());
}
