#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/system.hpp"

namespace roa {

struct StepUnderflow : std::runtime_error {
    StepUnderflow() : std::runtime_error("integrator step size collapsed below 1e-14") {}
};

enum class TrajClass { Converged, Diverged, Undetermined };

struct Trajectory {
    std::vector<double> x0;
    TrajClass classification = TrajClass::Undetermined;
    double value_v = 0.0;  // accumulated integral of ||x||^2
    double label_w = 0.0;  // tanh(alpha * value_v), or 1 for diverged
};

struct Dataset {
    struct Point {
        std::vector<double> x;
        double w;
    };
    std::vector<Point> points;
    double alpha = 0.1;
    std::uint64_t seed = 0;
};

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double horizon = 40.0;
};

// Integrates (xdot = f(x), zdot = ||x||^2) with adaptive Dormand-Prince
// RK4(5) until ||x|| <= 1e-3*diam(X) (Converged), ||x|| >= 10*diam(X) or x
// leaves 2X (Diverged), or t reaches the horizon (Undetermined).
Trajectory integrate(const DynamicalSystem& sys, const std::vector<double>& x0,
                     double alpha, const IntegrateOptions& opts = {});

// n_samples uniform points in X (seeded), integrated independently;
// Undetermined and underflowed points are skipped. Output order is by
// sample index, so the worker count never changes the dataset.
Dataset generate_data(const DynamicalSystem& sys, int n_samples, double alpha,
                      std::uint64_t seed, int jobs = 1,
                      const IntegrateOptions& opts = {});

void save_dataset_csv(const Dataset& ds, const std::vector<std::string>& var_names,
                      const std::string& path);
Dataset load_dataset_csv(const std::string& path);

}  // namespace roa
