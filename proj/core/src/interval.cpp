#include "roa/interval.hpp"

#include <algorithm>
#include <limits>

namespace roa {

namespace {

double step_down(double v, int ulps) {
    for (int i = 0; i < ulps; ++i)
        v = std::nextafter(v, -std::numeric_limits<double>::infinity());
    return v;
}

double step_up(double v, int ulps) {
    for (int i = 0; i < ulps; ++i)
        v = std::nextafter(v, std::numeric_limits<double>::infinity());
    return v;
}

void check_finite(Interval v, const char* op) {
    if (!std::isfinite(v.lo) || !std::isfinite(v.hi))
        throw EvalError(std::string("non-finite interval result in ") + op);
}

}  // namespace

Interval widen_out(Interval v) {
    return {step_down(v.lo, 4), step_up(v.hi, 4)};
}

Interval iadd(Interval a, Interval b) {
    Interval r{a.lo + b.lo, a.hi + b.hi};
    check_finite(r, "add");
    return widen_out(r);
}

Interval isub(Interval a, Interval b) {
    Interval r{a.lo - b.hi, a.hi - b.lo};
    check_finite(r, "sub");
    return widen_out(r);
}

Interval imul(Interval a, Interval b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Interval r{std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
    check_finite(r, "mul");
    return widen_out(r);
}

Interval idiv(Interval a, Interval b) {
    if (b.lo <= 0.0 && b.hi >= 0.0)
        throw EvalError("division by interval containing zero");
    double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
    Interval r{std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
    check_finite(r, "div");
    return widen_out(r);
}

Interval ineg(Interval a) { return {-a.hi, -a.lo}; }

Interval ipow(Interval a, int n) {
    if (n < 0) throw EvalError("negative integer power");
    if (n == 0) return Interval::point(1.0);
    if (n == 1) return a;
    double plo = std::pow(a.lo, n), phi = std::pow(a.hi, n);
    Interval r;
    if (n % 2 == 1) {
        r = {plo, phi};
    } else if (a.lo >= 0.0) {
        r = {plo, phi};
    } else if (a.hi <= 0.0) {
        r = {phi, plo};
    } else {
        r = {0.0, std::max(plo, phi)};
    }
    check_finite(r, "pow");
    return widen_out(r);
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Range of sin over [lo, hi] via critical-point analysis.
Interval sin_range(double lo, double hi) {
    if (hi - lo >= 2.0 * kPi) return {-1.0, 1.0};
    double smin = std::min(std::sin(lo), std::sin(hi));
    double smax = std::max(std::sin(lo), std::sin(hi));
    // peaks at pi/2 + 2k*pi, troughs at -pi/2 + 2k*pi
    double k0 = std::ceil((lo - kPi / 2.0) / (2.0 * kPi));
    if (kPi / 2.0 + 2.0 * kPi * k0 <= hi) smax = 1.0;
    double k1 = std::ceil((lo + kPi / 2.0) / (2.0 * kPi));
    if (-kPi / 2.0 + 2.0 * kPi * k1 <= hi) smin = -1.0;
    return {smin, smax};
}

}  // namespace

Interval isin(Interval a) {
    Interval r = sin_range(a.lo, a.hi);
    r = widen_out(r);
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

Interval icos(Interval a) {
    return isin({a.lo + kPi / 2.0, a.hi + kPi / 2.0});
}

Interval itanh(Interval a) {
    Interval r = widen_out({std::tanh(a.lo), std::tanh(a.hi)});
    r.lo = std::max(r.lo, -1.0);
    r.hi = std::min(r.hi, 1.0);
    return r;
}

Interval iexp(Interval a) {
    Interval r{std::exp(a.lo), std::exp(a.hi)};
    check_finite(r, "exp");
    r = widen_out(r);
    r.lo = std::max(r.lo, 0.0);
    return r;
}

Interval isqrt(Interval a) {
    if (a.lo < 0.0) throw EvalError("sqrt of interval with negative part");
    Interval r = widen_out({std::sqrt(a.lo), std::sqrt(a.hi)});
    r.lo = std::max(r.lo, 0.0);
    return r;
}

Interval iabs(Interval a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return {-a.hi, -a.lo};
    return {0.0, std::max(-a.lo, a.hi)};
}

Interval imin(Interval a, Interval b) {
    return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Interval imax(Interval a, Interval b) {
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval ihull(Interval a, Interval b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

bool iintersect(Interval a, Interval b, Interval& out) {
    double lo = std::max(a.lo, b.lo);
    double hi = std::min(a.hi, b.hi);
    if (lo > hi) return false;
    out = {lo, hi};
    return true;
}

}  // namespace roa
