#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "roa/system.hpp"
#include "roa/zubovdata.hpp"

namespace roa {

struct DegenerateReference : std::runtime_error {
    DegenerateReference() : std::runtime_error("simulated DOA reference is empty") {}
};

// Seed-pinned Monte Carlo sample of the domain with per-point simulated
// DOA membership (forward integration classification).
struct DoaSample {
    std::vector<std::vector<double>> points;
    std::vector<char> in_doa;
    std::uint64_t seed = 0;
    int doa_count = 0;
};

DoaSample simulate_doa(const DynamicalSystem& sys, int n_mc, std::uint64_t seed,
                       int jobs = 1, const IntegrateOptions& opts = {});

using RegionPredicate = std::function<bool(const std::vector<double>&)>;

struct VolumeEstimate {
    double fraction = 0.0;         // |region| / |simulated DOA|
    double half_width = 0.0;       // 95% binomial half-width of fraction
    double domain_fraction = 0.0;  // |region| / |domain sample|
    int region_count = 0;
    int doa_count = 0;
    int n_mc = 0;
};

// Fraction of the simulated DOA covered by the region, from a shared
// point sample. Throws DegenerateReference when no sampled point converges.
VolumeEstimate estimate_volume(const DoaSample& sample, const RegionPredicate& region);

// Convenience: sample n_mc (>= 1e4) fresh points and evaluate.
VolumeEstimate estimate_volume(const DynamicalSystem& sys, const RegionPredicate& region,
                               int n_mc, std::uint64_t seed, int jobs = 1,
                               const IntegrateOptions& opts = {});

}  // namespace roa
