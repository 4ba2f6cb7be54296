#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/interval.hpp"

namespace roa {

struct DimensionError : std::runtime_error {
    explicit DimensionError(std::size_t n)
        : std::runtime_error("contour export requires a 2-d state, got " + std::to_string(n)) {}
};

using Field2d = std::function<double(double, double)>;

struct Polyline {
    std::vector<std::array<double, 2>> pts;
    bool closed = false;
};

struct ContourSet {
    double level = 0.0;
    std::vector<Polyline> lines;
};

// Marching squares over a uniform resolution x resolution grid on the box.
std::vector<ContourSet> extract_contours(const Field2d& f, const Box& domain,
                                         const std::vector<double>& levels,
                                         int resolution = 400);

// CSV rows: level,polyline_index,x,y
void write_contours_csv(const std::vector<ContourSet>& sets, const std::string& path);

// Standalone SVG with domain frame and one path per polyline.
void write_contours_svg(const std::vector<ContourSet>& sets, const Box& domain,
                        const std::string& path);

// Convenience wrapper; throws DimensionError unless the box is 2-d.
void export_contours(const Field2d& f, const Box& domain,
                     const std::vector<double>& levels, int resolution,
                     const std::string& csv_path, const std::string& svg_path);

}  // namespace roa
