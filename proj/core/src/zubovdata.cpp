#include "roa/zubovdata.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace roa {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,   0.0,        7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

double diam(const Box& X) {
    double s = 0.0;
    for (const auto& iv : X.dims) s += iv.width() * iv.width();
    return std::sqrt(s);
}

double norm(const std::vector<double>& x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

}  // namespace

Trajectory integrate(const DynamicalSystem& sys, const std::vector<double>& x0,
                     double alpha, const IntegrateOptions& opts) {
    const std::size_t n = sys.dim();
    const double r_conv = 1e-3 * diam(sys.domain);
    const double r_blow = 10.0 * diam(sys.domain);

    Trajectory tr;
    tr.x0 = x0;

    // augmented state y = (x, z)
    std::vector<double> y(x0);
    y.push_back(0.0);
    auto rhs = [&](const std::vector<double>& s, std::vector<double>& out) {
        auto fx = sys.f.eval(s);  // extra state ignored by the exprs
        for (std::size_t i = 0; i < n; ++i) out[i] = fx[i];
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) w += s[i] * s[i];
        out[n] = w;
    };

    auto outside_2x = [&](const std::vector<double>& s) {
        for (std::size_t i = 0; i < n; ++i) {
            double m = sys.domain[i].mid(), h = sys.domain[i].width();
            if (s[i] < m - h || s[i] > m + h) return true;
        }
        return false;
    };

    auto classify = [&](const std::vector<double>& s) -> TrajClass {
        double r = norm(s, n);
        if (r <= r_conv) return TrajClass::Converged;
        if (r >= r_blow || outside_2x(s)) return TrajClass::Diverged;
        return TrajClass::Undetermined;
    };

    auto finish = [&](TrajClass cls) {
        tr.classification = cls;
        tr.value_v = y[n];
        tr.label_w = cls == TrajClass::Diverged ? 1.0 : std::tanh(alpha * tr.value_v);
        return tr;
    };

    TrajClass cls = classify(y);
    if (cls != TrajClass::Undetermined) return finish(cls);

    double t = 0.0, h = 1e-2;
    std::vector<std::vector<double>> k(7, std::vector<double>(n + 1));
    std::vector<double> stage(n + 1), y5(n + 1);
    while (t < opts.horizon) {
        h = std::min(h, opts.horizon - t);
        rhs(y, k[0]);
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i <= n; ++i) {
                double acc = y[i];
                for (int j = 0; j < s; ++j) acc += h * kA[s][j] * k[j][i];
                stage[i] = acc;
            }
            rhs(stage, k[s]);
        }
        double err = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double v5 = y[i], v4 = y[i];
            for (int s = 0; s < 7; ++s) {
                v5 += h * kB5[s] * k[s][i];
                v4 += h * kB4[s] * k[s][i];
            }
            y5[i] = v5;
            double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(v5));
            double e = (v5 - v4) / sc;
            err += e * e;
        }
        err = std::sqrt(err / (n + 1));
        if (err <= 1.0 || h <= 1e-14) {
            if (h <= 1e-14 && err > 1.0) throw StepUnderflow();
            t += h;
            y = y5;
            cls = classify(y);
            if (cls != TrajClass::Undetermined) return finish(cls);
        }
        double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-14) h = 1e-14;
        if (!std::isfinite(err)) throw StepUnderflow();
    }
    return finish(TrajClass::Undetermined);
}

Dataset generate_data(const DynamicalSystem& sys, int n_samples, double alpha,
                      std::uint64_t seed, int jobs, const IntegrateOptions& opts) {
    const std::size_t n = sys.dim();
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(n_samples));
    for (auto& x : samples) {
        x.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> u(sys.domain[i].lo, sys.domain[i].hi);
            x[i] = u(rng);
        }
    }

    std::vector<Trajectory> results(samples.size());
    std::vector<char> ok(samples.size(), 0);
    auto work = [&](std::size_t i) {
        try {
            results[i] = integrate(sys, samples[i], alpha, opts);
            ok[i] = results[i].classification != TrajClass::Undetermined;
        } catch (const StepUnderflow&) {
            ok[i] = 0;
        }
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < samples.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= samples.size()) return;
                    work(i);
                }
            });
        for (auto& th : workers) th.join();
    }

    Dataset ds;
    ds.alpha = alpha;
    ds.seed = seed;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (ok[i]) ds.points.push_back({samples[i], results[i].label_w});
    return ds;
}

void save_dataset_csv(const Dataset& ds, const std::vector<std::string>& var_names,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& v : var_names) out << v << ',';
    out << "w\n";
    char buf[64];
    for (const auto& p : ds.points) {
        for (double v : p.x) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", p.w);
        out << buf << '\n';
    }
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    Dataset ds;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() < 2) continue;
        Dataset::Point p;
        p.w = vals.back();
        vals.pop_back();
        p.x = std::move(vals);
        ds.points.push_back(std::move(p));
    }
    return ds;
}

}  // namespace roa
