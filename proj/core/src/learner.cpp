#include "roa/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace roa {

namespace {

// Forward pass with everything the tangent/backward passes need.
struct ForwardState {
    std::vector<std::vector<double>> a;  // a[0] = x, a[l] = tanh activations
    std::vector<std::vector<double>> s;  // tangent pre-activations W_l t_{l-1}
    std::vector<std::vector<double>> t;  // tangent t_l = (1 - a_l^2) . s_l
    double y = 0.0;                      // W_N(x)
    double u = 0.0;                      // grad W_N . v (tangent direction v)
    bool has_tangent = false;
};

void forward_full(const MlpNet& net, const std::vector<double>& x,
                  const std::vector<double>* tangent, ForwardState& st) {
    const std::size_t L = net.W.size();
    st.a.assign(L, {});
    st.s.assign(L, {});
    st.t.assign(L, {});
    st.has_tangent = tangent != nullptr;
    const std::vector<double>* prev_a = &x;
    const std::vector<double>* prev_t = tangent;
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const Matrix& W = net.W[l];
        std::vector<double> z = W.apply(*prev_a);
        for (int i = 0; i < W.rows(); ++i) z[i] = std::tanh(z[i] + net.b[l][i]);
        st.a[l] = std::move(z);
        if (tangent) {
            st.s[l] = W.apply(*prev_t);
            st.t[l].resize(st.s[l].size());
            for (std::size_t i = 0; i < st.s[l].size(); ++i) {
                double d = 1.0 - st.a[l][i] * st.a[l][i];
                st.t[l][i] = d * st.s[l][i];
            }
            prev_t = &st.t[l];
        }
        prev_a = &st.a[l];
    }
    const Matrix& Wo = net.W[L - 1];
    st.y = net.b[L - 1][0];
    for (int j = 0; j < Wo.cols(); ++j) st.y += Wo(0, j) * (*prev_a)[j];
    if (tangent) {
        st.u = 0.0;
        for (int j = 0; j < Wo.cols(); ++j) st.u += Wo(0, j) * (*prev_t)[j];
    }
}

// Reverse pass seeded with dL/dy and dL/du; handles the second-order terms
// flowing back through the tangent chain.
void backward(const MlpNet& net, const std::vector<double>& x,
              const std::vector<double>* tangent, const ForwardState& st,
              double ybar, double ubar, NetGrads& g) {
    const std::size_t L = net.W.size();
    const std::vector<double>& aD = L >= 2 ? st.a[L - 2] : x;
    const Matrix& Wo = net.W[L - 1];
    g.b[L - 1][0] += ybar;
    for (int j = 0; j < Wo.cols(); ++j) g.W[L - 1](0, j) += ybar * aD[j];
    std::vector<double> abar(Wo.cols()), tbar;
    for (int j = 0; j < Wo.cols(); ++j) abar[j] = ybar * Wo(0, j);
    const bool tan_active = st.has_tangent && ubar != 0.0;
    if (tan_active) {
        const std::vector<double>& tD = L >= 2 ? st.t[L - 2] : *tangent;
        tbar.resize(Wo.cols());
        for (int j = 0; j < Wo.cols(); ++j) {
            g.W[L - 1](0, j) += ubar * tD[j];
            tbar[j] = ubar * Wo(0, j);
        }
    }
    for (std::size_t li = L - 1; li-- > 0;) {
        const Matrix& W = net.W[li];
        const std::vector<double>& al = st.a[li];
        const std::vector<double>& ain = li == 0 ? x : st.a[li - 1];
        std::vector<double> sbar;
        if (tan_active) {
            const std::vector<double>& tin = li == 0 ? *tangent : st.t[li - 1];
            sbar.resize(al.size());
            for (std::size_t i = 0; i < al.size(); ++i) {
                sbar[i] = (1.0 - al[i] * al[i]) * tbar[i];
                abar[i] += -2.0 * al[i] * st.s[li][i] * tbar[i];
            }
            for (std::size_t i = 0; i < al.size(); ++i)
                for (int j = 0; j < W.cols(); ++j)
                    g.W[li](static_cast<int>(i), j) += sbar[i] * tin[j];
        }
        std::vector<double> zbar(al.size());
        for (std::size_t i = 0; i < al.size(); ++i) {
            zbar[i] = (1.0 - al[i] * al[i]) * abar[i];
            g.b[li][i] += zbar[i];
        }
        for (std::size_t i = 0; i < al.size(); ++i)
            for (int j = 0; j < W.cols(); ++j)
                g.W[li](static_cast<int>(i), j) += zbar[i] * ain[j];
        if (li > 0) {
            abar.assign(W.cols(), 0.0);
            for (std::size_t i = 0; i < al.size(); ++i)
                for (int j = 0; j < W.cols(); ++j) abar[j] += W(static_cast<int>(i), j) * zbar[i];
            if (tan_active) {
                std::vector<double> ntbar(W.cols(), 0.0);
                for (std::size_t i = 0; i < al.size(); ++i)
                    for (int j = 0; j < W.cols(); ++j)
                        ntbar[j] += W(static_cast<int>(i), j) * sbar[i];
                tbar = std::move(ntbar);
            }
        }
    }
}

double sq_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

double MlpNet::forward(const std::vector<double>& x) const {
    ForwardState st;
    forward_full(*this, x, nullptr, st);
    return st.y;
}

std::vector<double> MlpNet::input_gradient(const std::vector<double>& x) const {
    const int n = dims.front();
    std::vector<double> grad(n);
    std::vector<double> e(n, 0.0);
    ForwardState st;
    for (int k = 0; k < n; ++k) {
        e[k] = 1.0;
        forward_full(*this, x, &e, st);
        grad[k] = st.u;
        e[k] = 0.0;
    }
    return grad;
}

MlpNet init_net(const std::vector<int>& dims, double alpha, std::uint64_t seed) {
    if (dims.size() < 2 || dims.back() != 1)
        throw std::invalid_argument("init_net: dims must end with output width 1");
    MlpNet net;
    net.dims = dims;
    net.alpha = alpha;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        int fan_in = dims[l], fan_out = dims[l + 1];
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix W(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) W(i, j) = dist(rng);
        net.W.push_back(std::move(W));
        net.b.emplace_back(fan_out, 0.0);
    }
    return net;
}

NetGrads::NetGrads(const MlpNet& net) {
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        W.emplace_back(net.W[l].rows(), net.W[l].cols());
        b.emplace_back(net.b[l].size(), 0.0);
    }
}

void NetGrads::zero() {
    for (auto& m : W) m = Matrix(m.rows(), m.cols());
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

LossBreakdown loss_and_grad(const MlpNet& net, const DynamicalSystem& sys,
                            const std::vector<std::vector<double>>& colloc,
                            const std::vector<Dataset::Point>& data,
                            const TrainConfig& cfg, NetGrads& grads) {
    LossBreakdown out;
    const double alpha = cfg.alpha;
    ForwardState st;

    auto hinge_terms = [&](const std::vector<double>& x, const ForwardState& fs,
                           double scale, double& loss_acc, double& ybar) {
        if (!cfg.sandwich) return;
        double q = sq_norm(x);
        double lo = std::tanh(cfg.sandwich->first * q);
        double hi = std::tanh(cfg.sandwich->second * q);
        double p1 = std::max(0.0, lo - fs.y);
        double p2 = std::max(0.0, fs.y - hi);
        loss_acc += scale * (p1 * p1 + p2 * p2);
        ybar += scale * 2.0 * (p2 - p1);
    };

    if (cfg.loss_mode != LossMode::Data && !colloc.empty()) {
        const double scale = cfg.w_residual / static_cast<double>(colloc.size());
        for (const auto& x : colloc) {
            std::vector<double> fx = sys.f.eval(x);
            forward_full(net, x, &fx, st);
            double q = sq_norm(x);
            double ybar = 0.0, ubar = 0.0;
            if (cfg.loss_mode == LossMode::Zubov) {
                double R = st.u + alpha * q * (1.0 - st.y * st.y);
                out.residual += scale * R * R;
                ubar = 2.0 * scale * R;
                ybar = -2.0 * scale * R * alpha * q * 2.0 * st.y;
            } else {  // Lyapunov
                double h = std::max(0.0, st.u + 0.01 * q);
                double p = std::max(0.0, 0.001 * q - st.y);
                out.residual += scale * (h * h + p * p);
                ubar = 2.0 * scale * h;
                ybar = 2.0 * scale * p * -1.0 * (p > 0.0 ? 1.0 : 0.0);
            }
            double bscale = cfg.w_boundary / static_cast<double>(colloc.size());
            hinge_terms(x, st, bscale, out.boundary, ybar);
            backward(net, x, &fx, st, ybar, ubar, grads);
        }
    }

    if (cfg.loss_mode != LossMode::Lyapunov && !data.empty()) {
        const double scale = cfg.w_data / static_cast<double>(data.size());
        for (const auto& p : data) {
            forward_full(net, p.x, nullptr, st);
            double d = st.y - p.w;
            out.data += scale * d * d;
            double ybar = 2.0 * scale * d;
            if (cfg.loss_mode == LossMode::Data) {
                double bscale = cfg.w_boundary / static_cast<double>(data.size());
                hinge_terms(p.x, st, bscale, out.boundary, ybar);
            }
            backward(net, p.x, nullptr, st, ybar, 0.0, grads);
        }
    }

    // Boundary condition W_N(0) = 0.
    std::vector<double> zero(static_cast<std::size_t>(net.dims.front()), 0.0);
    forward_full(net, zero, nullptr, st);
    out.boundary += cfg.w_boundary * st.y * st.y;
    backward(net, zero, nullptr, st, cfg.w_boundary * 2.0 * st.y, 0.0, grads);

    out.total = out.residual + out.boundary + out.data;
    return out;
}

namespace {

struct AdamState {
    NetGrads m, v;
    long step = 0;
    explicit AdamState(const MlpNet& net) : m(net), v(net) {}
};

void adam_update(MlpNet& net, const NetGrads& g, AdamState& st, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++st.step;
    double c1 = 1.0 - std::pow(b1, st.step);
    double c2 = 1.0 - std::pow(b2, st.step);
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        for (int i = 0; i < net.W[l].rows(); ++i)
            for (int j = 0; j < net.W[l].cols(); ++j) {
                double gr = g.W[l](i, j);
                double& m = st.m.W[l](i, j);
                double& v = st.v.W[l](i, j);
                m = b1 * m + (1.0 - b1) * gr;
                v = b2 * v + (1.0 - b2) * gr * gr;
                net.W[l](i, j) -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
            }
        for (std::size_t i = 0; i < net.b[l].size(); ++i) {
            double gr = g.b[l][i];
            double& m = st.m.b[l][i];
            double& v = st.v.b[l][i];
            m = b1 * m + (1.0 - b1) * gr;
            v = b2 * v + (1.0 - b2) * gr * gr;
            net.b[l][i] -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
        }
    }
}

}  // namespace

TrainResult train(const DynamicalSystem& sys, const Dataset& data,
                  const TrainConfig& cfg) {
    const int n = static_cast<int>(sys.dim());
    std::vector<int> dims;
    dims.push_back(n);
    for (int l = 0; l < cfg.layer; ++l) dims.push_back(cfg.width);
    dims.push_back(1);

    std::mt19937_64 rng(cfg.seed);
    TrainResult res;
    res.net = init_net(dims, cfg.alpha, rng());

    // Collocation set is drawn once and kept fixed across epochs.
    std::vector<std::vector<double>> colloc;
    if (cfg.loss_mode != LossMode::Data) {
        colloc.reserve(cfg.num_colloc_pts);
        std::vector<std::uniform_real_distribution<double>> dists;
        for (int k = 0; k < n; ++k)
            dists.emplace_back(sys.domain[k].lo, sys.domain[k].hi);
        for (int i = 0; i < cfg.num_colloc_pts; ++i) {
            std::vector<double> x(n);
            for (int k = 0; k < n; ++k) x[k] = dists[k](rng);
            colloc.push_back(std::move(x));
        }
    }

    const std::size_t drive = cfg.loss_mode == LossMode::Data
                                  ? data.points.size()
                                  : colloc.size();
    if (cfg.max_epoch == 0 || drive == 0) return res;

    std::vector<std::size_t> order(drive);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> data_order(data.points.size());
    std::iota(data_order.begin(), data_order.end(), 0);
    std::size_t data_cursor = 0;

    NetGrads grads(res.net);
    AdamState adam(res.net);
    const std::size_t B = static_cast<std::size_t>(std::max(1, cfg.batch_size));

    for (int epoch = 1; epoch <= cfg.max_epoch; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        LossBreakdown epoch_sum;
        int n_batches = 0;
        for (std::size_t start = 0; start < drive; start += B) {
            std::size_t end = std::min(drive, start + B);
            std::vector<std::vector<double>> cb;
            std::vector<Dataset::Point> db;
            if (cfg.loss_mode == LossMode::Data) {
                for (std::size_t i = start; i < end; ++i)
                    db.push_back(data.points[order[i]]);
            } else {
                for (std::size_t i = start; i < end; ++i) cb.push_back(colloc[order[i]]);
                if (cfg.loss_mode == LossMode::Zubov && !data.points.empty()) {
                    for (std::size_t i = start; i < end; ++i) {
                        if (data_cursor == 0)
                            std::shuffle(data_order.begin(), data_order.end(), rng);
                        db.push_back(data.points[data_order[data_cursor]]);
                        data_cursor = (data_cursor + 1) % data_order.size();
                    }
                }
            }
            grads.zero();
            LossBreakdown lb = loss_and_grad(res.net, sys, cb, db, cfg, grads);
            if (!std::isfinite(lb.total)) throw DivergedTraining();
            adam_update(res.net, grads, adam, cfg.lr);
            epoch_sum.residual += lb.residual;
            epoch_sum.boundary += lb.boundary;
            epoch_sum.data += lb.data;
            epoch_sum.total += lb.total;
            ++n_batches;
        }
        double inv = 1.0 / n_batches;
        res.log.push_back({epoch, epoch_sum.residual * inv, epoch_sum.boundary * inv,
                           epoch_sum.data * inv, epoch_sum.total * inv});
    }
    return res;
}

void save_net(const MlpNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_net: cannot open " + path);
    out << "zubovnet v1\n";
    for (std::size_t i = 0; i < net.dims.size(); ++i)
        out << (i ? " " : "") << net.dims[i];
    out << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", net.alpha);
    out << "alpha " << buf << "\n";
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        for (int i = 0; i < net.W[l].rows(); ++i) {
            for (int j = 0; j < net.W[l].cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", net.W[l](i, j));
                out << (j ? " " : "") << buf;
            }
            out << "\n";
        }
        for (std::size_t i = 0; i < net.b[l].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", net.b[l][i]);
            out << (i ? " " : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_net: write failed for " + path);
}

MlpNet load_net(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_net: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "zubovnet v1")
        throw std::runtime_error("load_net: bad header in " + path);
    if (!std::getline(in, line)) throw std::runtime_error("load_net: missing dims");
    MlpNet net;
    {
        std::istringstream ss(line);
        int d;
        while (ss >> d) net.dims.push_back(d);
    }
    if (net.dims.size() < 2 || net.dims.back() != 1)
        throw std::runtime_error("load_net: invalid dims");
    std::string tag;
    if (!(in >> tag >> net.alpha) || tag != "alpha")
        throw std::runtime_error("load_net: missing alpha line");
    for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
        Matrix W(net.dims[l + 1], net.dims[l]);
        for (int i = 0; i < W.rows(); ++i)
            for (int j = 0; j < W.cols(); ++j)
                if (!(in >> W(i, j))) throw std::runtime_error("load_net: truncated weights");
        std::vector<double> b(net.dims[l + 1]);
        for (auto& v : b)
            if (!(in >> v)) throw std::runtime_error("load_net: truncated biases");
        net.W.push_back(std::move(W));
        net.b.push_back(std::move(b));
    }
    return net;
}

void save_training_log(const std::vector<TrainLogEntry>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "epoch,residual,boundary,data,total\n";
    char buf[64];
    for (const auto& e : log) {
        out << e.epoch;
        for (double v : {e.residual, e.boundary, e.data, e.total}) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace roa
