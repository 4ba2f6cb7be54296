#include "roa/volume.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace roa {

DoaSample simulate_doa(const DynamicalSystem& sys, int n_mc, std::uint64_t seed,
                       int jobs, const IntegrateOptions& opts) {
    if (n_mc < 10000)
        throw std::invalid_argument("simulate_doa: n_mc must be at least 1e4");
    DoaSample out;
    out.seed = seed;
    std::mt19937_64 rng(seed);
    out.points.reserve(n_mc);
    for (int i = 0; i < n_mc; ++i) {
        std::vector<double> x(sys.dim());
        for (std::size_t k = 0; k < sys.dim(); ++k) {
            std::uniform_real_distribution<double> d(sys.domain[k].lo, sys.domain[k].hi);
            x[k] = d(rng);
        }
        out.points.push_back(std::move(x));
    }
    out.in_doa.assign(n_mc, 0);

    auto worker_body = [&](std::atomic<int>& next) {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n_mc) return;
            try {
                Trajectory t = integrate(sys, out.points[i], 0.1, opts);
                out.in_doa[i] = t.classification == TrajClass::Converged ? 1 : 0;
            } catch (const StepUnderflow&) {
                out.in_doa[i] = 0;
            }
        }
    };
    std::atomic<int> next{0};
    if (jobs <= 1) {
        worker_body(next);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back([&] { worker_body(next); });
        for (auto& t : pool) t.join();
    }
    for (char c : out.in_doa) out.doa_count += c;
    return out;
}

VolumeEstimate estimate_volume(const DoaSample& sample, const RegionPredicate& region) {
    VolumeEstimate est;
    est.n_mc = static_cast<int>(sample.points.size());
    est.doa_count = sample.doa_count;
    if (sample.doa_count == 0) throw DegenerateReference();
    for (const auto& x : sample.points)
        if (region(x)) ++est.region_count;
    est.fraction = static_cast<double>(est.region_count) / sample.doa_count;
    est.domain_fraction = static_cast<double>(est.region_count) / est.n_mc;
    double p = std::min(1.0, est.fraction);
    est.half_width = 1.96 * std::sqrt(p * (1.0 - p) / sample.doa_count);
    return est;
}

VolumeEstimate estimate_volume(const DynamicalSystem& sys, const RegionPredicate& region,
                               int n_mc, std::uint64_t seed, int jobs,
                               const IntegrateOptions& opts) {
    return estimate_volume(simulate_doa(sys, n_mc, seed, jobs, opts), region);
}

}  // namespace roa
