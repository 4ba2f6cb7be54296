#include "roa/neuralverify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace roa {

namespace {

// Interval activations of every hidden layer plus the output enclosure.
struct IntervalForward {
    std::vector<std::vector<Interval>> a;  // hidden tanh enclosures
    Interval y;
};

IntervalForward forward_intervals(const MlpNet& net, const Box& box) {
    IntervalForward st;
    const std::size_t L = net.W.size();
    std::vector<Interval> cur(box.dims);
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const Matrix& W = net.W[l];
        std::vector<Interval> next(W.rows());
        for (int i = 0; i < W.rows(); ++i) {
            Interval z = Interval::point(net.b[l][i]);
            for (int j = 0; j < W.cols(); ++j)
                z = iadd(z, imul(Interval::point(W(i, j)), cur[j]));
            next[i] = itanh(z);
        }
        st.a.push_back(next);
        cur = std::move(next);
    }
    const Matrix& Wo = net.W[L - 1];
    Interval y = Interval::point(net.b[L - 1][0]);
    for (int j = 0; j < Wo.cols(); ++j)
        y = iadd(y, imul(Interval::point(Wo(0, j)), cur[j]));
    st.y = y;
    return st;
}

std::vector<Interval> gradient_from_forward(const MlpNet& net, const IntervalForward& st) {
    const std::size_t L = net.W.size();
    const Matrix& Wo = net.W[L - 1];
    std::vector<Interval> g(Wo.cols());
    for (int j = 0; j < Wo.cols(); ++j) g[j] = Interval::point(Wo(0, j));
    for (std::size_t li = L - 1; li-- > 0;) {
        const Matrix& W = net.W[li];
        // tanh' = 1 - tanh^2 through the stored tanh enclosure
        std::vector<Interval> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            Interval d = isub(Interval::point(1.0), ipow(st.a[li][i], 2));
            v[i] = imul(g[i], d);
        }
        std::vector<Interval> prev(W.cols(), Interval::point(0.0));
        for (std::size_t i = 0; i < v.size(); ++i)
            for (int j = 0; j < W.cols(); ++j)
                prev[j] = iadd(prev[j], imul(v[i], Interval::point(W(static_cast<int>(i), j))));
        g = std::move(prev);
    }
    return g;
}

}  // namespace

Interval net_interval(const MlpNet& net, const Box& box) {
    return forward_intervals(net, box).y;
}

std::vector<Interval> net_gradient_interval(const MlpNet& net, const Box& box) {
    IntervalForward st = forward_intervals(net, box);
    return gradient_from_forward(net, st);
}

Interval net_lie_interval(const MlpNet& net, const DynamicalSystem& sys, const Box& box) {
    std::vector<Interval> g = net_gradient_interval(net, box);
    Interval out = Interval::point(0.0);
    for (std::size_t j = 0; j < g.size(); ++j)
        out = iadd(out, imul(g[j], sys.f.exprs[j].eval_interval(box)));
    return out;
}

NetFn::NetFn(std::shared_ptr<const MlpNet> net, double scale, double offset)
    : net_(std::move(net)), scale_(scale), offset_(offset),
      support_(static_cast<std::size_t>(net_->dims.front())) {
    std::iota(support_.begin(), support_.end(), 0);
}

Interval NetFn::enclose(const Box& box) const {
    Interval w = net_interval(*net_, box);
    return widen_out(iadd(imul(Interval::point(scale_), w), Interval::point(offset_)));
}

Interval NetFn::enclose_refined(const Box& box) const {
    Interval nat = enclose(box);
    // centered form W(mid) + grad(B) . (B - mid)
    std::vector<double> mid(box.size());
    for (std::size_t k = 0; k < box.size(); ++k) mid[k] = box[k].mid();
    std::vector<Interval> g = net_gradient_interval(*net_, box);
    Interval c = widen_out(Interval::point(net_->forward(mid)));
    for (std::size_t k = 0; k < box.size(); ++k) {
        Interval dk = isub(box[k], Interval::point(mid[k]));
        c = iadd(c, imul(g[k], dk));
    }
    c = widen_out(iadd(imul(Interval::point(scale_), c), Interval::point(offset_)));
    Interval out;
    if (iintersect(nat, c, out)) return out;
    return nat;
}

double NetFn::value(const std::vector<double>& point) const {
    return scale_ * net_->forward(point) + offset_;
}

NetLieFn::NetLieFn(std::shared_ptr<const MlpNet> net, const DynamicalSystem* sys, double offset)
    : net_(std::move(net)), sys_(sys), offset_(offset),
      support_(static_cast<std::size_t>(net_->dims.front())) {
    std::iota(support_.begin(), support_.end(), 0);
}

Interval NetLieFn::enclose(const Box& box) const {
    return widen_out(iadd(net_lie_interval(*net_, *sys_, box), Interval::point(offset_)));
}

double NetLieFn::value(const std::vector<double>& point) const {
    std::vector<double> g = net_->input_gradient(point);
    std::vector<double> fx = sys_->f.eval(point);
    double s = offset_;
    for (std::size_t j = 0; j < g.size(); ++j) s += g[j] * fx[j];
    return s;
}

NeuralLevels neural_verifier_fns(
    const DynamicalSystem& sys,
    const std::function<std::shared_ptr<const ScalarFn>(double, double)>& make_w,
    const std::function<std::shared_ptr<const ScalarFn>(double)>& make_lie,
    double c_target, double w_hi, const VerifyOptions& opts) {
    const std::size_t n = sys.dim();
    auto make_query = [&](const Box& dom) {
        Query q;
        q.domain = dom;
        q.delta = opts.delta;
        q.min_width = opts.min_width;
        q.budget = opts.budget;
        q.jobs = opts.jobs;
        return q;
    };

    const double tol = 1e-3;

    // Step 1: inclusion {W_N <= c1} subset of {x^T P x <= c_target}
    auto goal1 = std::make_shared<ExprFn>(
        Expr::sub(quadratic_form_expr(sys.P), Expr::constant(c_target)), true);
    auto verified_c1 = [&](double c1) {
        Query q = make_query(sys.domain);
        q.premises = {make_w(1.0, -c1)};
        q.goal = goal1;
        return check_with_mean_value(q).verified();
    };
    NeuralLevels out;
    out.c1 = bisect_level(verified_c1, 0.0, std::max(tol, w_hi), tol);

    // Step 2: decrease on the band + boundary exclusion
    auto verified_c2 = [&](double c2) {
        if (c2 <= out.c1) return true;
        double eps = 1e-4 * (c2 - out.c1);
        {
            Query q = make_query(sys.domain);
            q.premises = {make_w(-1.0, out.c1), make_w(1.0, -c2)};
            q.goal = make_lie(eps);
            if (!check_with_mean_value(q).verified()) return false;
        }
        // every domain face must satisfy W_N >= c2 (sublevel set avoids it)
        for (std::size_t k = 0; k < n; ++k) {
            for (int side = 0; side < 2; ++side) {
                Box face = sys.domain;
                double w = face[k].width() * opts.min_width;
                if (side == 0)
                    face[k] = Interval(face[k].lo, face[k].lo + w);
                else
                    face[k] = Interval(face[k].hi - w, face[k].hi);
                Query q = make_query(face);
                q.goal = make_w(-1.0, c2 + opts.delta);
                if (!check_with_mean_value(q).verified()) return false;
            }
        }
        return true;
    };
    out.c2 = bisect_level(verified_c2, out.c1, std::max(out.c1 + tol, w_hi), tol);
    return out;
}

NeuralLevels neural_verifier(const DynamicalSystem& sys, const MlpNet& net,
                             double c_target, const VerifyOptions& opts) {
    auto shared_net = std::make_shared<MlpNet>(net);
    auto make_w = [shared_net](double scale, double offset) {
        return std::static_pointer_cast<const ScalarFn>(
            std::make_shared<NetFn>(shared_net, scale, offset));
    };
    const DynamicalSystem* sp = &sys;
    auto make_lie = [shared_net, sp](double offset) {
        return std::static_pointer_cast<const ScalarFn>(
            std::make_shared<NetLieFn>(shared_net, sp, offset));
    };
    return neural_verifier_fns(sys, make_w, make_lie, c_target,
                               net_interval(net, sys.domain).hi, opts);
}

}  // namespace roa
