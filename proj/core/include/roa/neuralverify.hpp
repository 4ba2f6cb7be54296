#pragma once

#include <memory>

#include "roa/learner.hpp"
#include "roa/options.hpp"
#include "roa/prover.hpp"
#include "roa/system.hpp"

namespace roa {

// Sound enclosure of {W_N(x) : x in box} by layer-wise interval propagation.
Interval net_interval(const MlpNet& net, const Box& box);

// Sound enclosure of the gradient of W_N over the box (interval backward pass).
std::vector<Interval> net_gradient_interval(const MlpNet& net, const Box& box);

// Sound enclosure of grad W_N(x) . f(x) over the box.
Interval net_lie_interval(const MlpNet& net, const DynamicalSystem& sys, const Box& box);

// scale * W_N(x) + offset as a prover-consumable function; the refined
// enclosure intersects the natural propagation with the centered form.
class NetFn : public ScalarFn {
public:
    NetFn(std::shared_ptr<const MlpNet> net, double scale, double offset);
    Interval enclose(const Box& box) const override;
    Interval enclose_refined(const Box& box) const override;
    double value(const std::vector<double>& point) const override;
    const std::vector<int>& support() const override { return support_; }

private:
    std::shared_ptr<const MlpNet> net_;
    double scale_, offset_;
    std::vector<int> support_;
};

// grad W_N . f + offset.
class NetLieFn : public ScalarFn {
public:
    NetLieFn(std::shared_ptr<const MlpNet> net, const DynamicalSystem* sys, double offset);
    Interval enclose(const Box& box) const override;
    double value(const std::vector<double>& point) const override;
    const std::vector<int>& support() const override { return support_; }

private:
    std::shared_ptr<const MlpNet> net_;
    const DynamicalSystem* sys_;
    double offset_;
    std::vector<int> support_;
};

struct NeuralLevels {
    double c1 = 0.0, c2 = 0.0;
};

// Generic core of the two-step neural verification: make_w(scale, offset)
// yields scale*W + offset and make_lie(offset) yields grad W . f + offset,
// both as prover-consumable functions. w_hi bounds W over the domain.
NeuralLevels neural_verifier_fns(
    const DynamicalSystem& sys,
    const std::function<std::shared_ptr<const ScalarFn>(double, double)>& make_w,
    const std::function<std::shared_ptr<const ScalarFn>(double)>& make_lie,
    double c_target, double w_hi, const VerifyOptions& opts = {});

// Step 1: largest c1 with (W_N <= c1, x in X) => x^T P x <= c_target.
// Step 2: largest c2 > c1 with the decrease condition on the band
// c1 <= W_N <= c2 and {W_N <= c2} excluded from the domain boundary.
NeuralLevels neural_verifier(const DynamicalSystem& sys, const MlpNet& net,
                             double c_target, const VerifyOptions& opts = {});

}  // namespace roa
