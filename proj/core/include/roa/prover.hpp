#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "roa/expr.hpp"
#include "roa/interval.hpp"

namespace roa {

// Scalar function the prover can bound over boxes. Expression-backed and
// network-backed implementations share this contract: enclose() must
// return a sound enclosure of {f(x) : x in box}.
class ScalarFn {
public:
    virtual ~ScalarFn() = default;
    virtual Interval enclose(const Box& box) const = 0;
    // Optionally tighter enclosure (e.g. centered form). Must still be sound.
    virtual Interval enclose_refined(const Box& box) const { return enclose(box); }
    virtual double value(const std::vector<double>& point) const = 0;
    // Dimensions the value depends on; the prover only bisects these.
    virtual const std::vector<int>& support() const = 0;
};

// Expression-backed ScalarFn. With gradient enabled, enclose_refined
// intersects the natural extension with the centered form
// f(c) + grad f(B) . (B - c).
class ExprFn : public ScalarFn {
public:
    explicit ExprFn(Expr e, bool with_gradient = false);

    Interval enclose(const Box& box) const override;
    Interval enclose_refined(const Box& box) const override;
    double value(const std::vector<double>& point) const override;
    const std::vector<int>& support() const override { return support_; }

    const Expr& expr() const { return expr_; }

private:
    Expr expr_;
    std::vector<int> support_;
    std::vector<Expr> grad_;  // indexed by support position; empty if disabled
};

struct ResourceExhausted : std::runtime_error {
    std::uint64_t budget;
    explicit ResourceExhausted(std::uint64_t b)
        : std::runtime_error("prover box budget exhausted"), budget(b) {}
};

struct NoLevel : std::runtime_error {
    NoLevel() : std::runtime_error("no verifiable level") {}
};

// Universally quantified implication over a box:
//   for all x in domain:  (premises all <= 0)  =>  goal <= 0
struct Query {
    Box domain;
    std::vector<std::shared_ptr<const ScalarFn>> premises;
    std::shared_ptr<const ScalarFn> goal;
    double delta = 1e-5;
    double min_width = 1e-6;  // relative to per-dimension domain width
    std::uint64_t budget = 50'000'000;
    int jobs = 1;
};

enum class VerdictStatus { Verified, Refuted, DeltaUnknown };

struct Verdict {
    VerdictStatus status = VerdictStatus::Verified;
    std::vector<double> witness;      // Refuted: premises hold within delta, goal > 0
    double witness_goal_value = 0.0;  // Refuted
    Box unknown_box;                  // DeltaUnknown: below the width floor
    std::uint64_t boxes_processed = 0;
    double wall_time = 0.0;

    bool verified() const { return status == VerdictStatus::Verified; }
};

// Branch-and-prune search for a violation of the query. Depth-first,
// widest-dimension bisection (relative widths, ties by lowest index).
Verdict check(const Query& q);

// As check, but switches to the refined (centered-form) goal enclosure on
// lineages where the natural extension failed to prune twice in a row.
Verdict check_with_mean_value(const Query& q);

// Largest c in [lo, hi] (abs tolerance tol) for which `verified_at` holds,
// assuming monotonicity (verified at c implies verified at any c' < c).
// DeltaUnknown counts as failure. Throws NoLevel when even lo fails.
double bisect_level(const std::function<bool(double)>& verified_at,
                    double lo, double hi, double tol);

}  // namespace roa
