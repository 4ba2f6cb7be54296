#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace roa {

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Closed real interval [lo, hi], both endpoints finite.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {}
    static Interval point(double v) { return {v, v}; }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

// Outward rounding policy: widen each endpoint by 4 ulps after every
// primitive operation. Sound for the accuracy regime the verifiers target
// without switching FP rounding modes.
Interval widen_out(Interval v);

Interval iadd(Interval a, Interval b);
Interval isub(Interval a, Interval b);
Interval imul(Interval a, Interval b);
Interval idiv(Interval a, Interval b);   // throws EvalError if 0 in b
Interval ineg(Interval a);
Interval ipow(Interval a, int n);        // n >= 0; even powers 0-anchored
Interval isin(Interval a);
Interval icos(Interval a);
Interval itanh(Interval a);
Interval iexp(Interval a);
Interval isqrt(Interval a);              // throws EvalError if a.lo < 0
Interval iabs(Interval a);
Interval imin(Interval a, Interval b);
Interval imax(Interval a, Interval b);
Interval ihull(Interval a, Interval b);
// Intersection; empty results are clamped to a degenerate interval and
// flagged by the return value.
bool iintersect(Interval a, Interval b, Interval& out);

// Axis-aligned box: one interval per state dimension.
struct Box {
    std::vector<Interval> dims;

    Box() = default;
    explicit Box(std::vector<Interval> d) : dims(std::move(d)) {}
    static Box uniform(std::size_t n, double lo, double hi) {
        return Box(std::vector<Interval>(n, Interval(lo, hi)));
    }

    std::size_t size() const { return dims.size(); }
    Interval& operator[](std::size_t i) { return dims[i]; }
    const Interval& operator[](std::size_t i) const { return dims[i]; }

    std::vector<double> midpoint() const {
        std::vector<double> m(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) m[i] = dims[i].mid();
        return m;
    }
    bool contains(const std::vector<double>& x) const {
        if (x.size() != dims.size()) return false;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (!dims[i].contains(x[i])) return false;
        return true;
    }
};

}  // namespace roa
