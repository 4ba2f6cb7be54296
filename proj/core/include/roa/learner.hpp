#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roa/linalg.hpp"
#include "roa/system.hpp"
#include "roa/zubovdata.hpp"

namespace roa {

struct DivergedTraining : std::runtime_error {
    DivergedTraining() : std::runtime_error("training loss became non-finite") {}
};

// Fully connected tanh MLP with identity output, W_N(x; theta).
struct MlpNet {
    std::vector<int> dims;              // [n, w_1, ..., w_d, 1]
    std::vector<Matrix> W;              // dims.size()-1 layers
    std::vector<std::vector<double>> b;
    double alpha = 0.1;                 // beta(s) = tanh(alpha s) used for labels

    double forward(const std::vector<double>& x) const;
    std::vector<double> input_gradient(const std::vector<double>& x) const;
    std::size_t n_layers() const { return W.size(); }
};

MlpNet init_net(const std::vector<int>& dims, double alpha, std::uint64_t seed);

enum class LossMode { Zubov, Data, Lyapunov };

struct TrainConfig {
    double lr = 1e-3;
    int layer = 2;
    int width = 30;
    int num_colloc_pts = 300000;
    int max_epoch = 20;
    int batch_size = 32;
    LossMode loss_mode = LossMode::Zubov;
    double alpha = 0.1;
    std::optional<std::pair<double, double>> sandwich;  // c1, c2 of the hinge bounds
    std::uint64_t seed = 0;
    double w_residual = 1.0, w_boundary = 1.0, w_data = 1.0;
};

// Parameter-shaped gradient accumulator.
struct NetGrads {
    std::vector<Matrix> W;
    std::vector<std::vector<double>> b;
    explicit NetGrads(const MlpNet& net);
    void zero();
};

struct LossBreakdown {
    double residual = 0.0, boundary = 0.0, data = 0.0, total = 0.0;
};

// Loss and full parameter gradient over one batch pair. colloc drives the
// residual term (Zubov/Lyapunov modes); data drives the data term
// (Zubov/Data modes); the boundary term W_N(0)^2 (plus optional sandwich
// hinges) is always included.
LossBreakdown loss_and_grad(const MlpNet& net, const DynamicalSystem& sys,
                            const std::vector<std::vector<double>>& colloc,
                            const std::vector<Dataset::Point>& data,
                            const TrainConfig& cfg, NetGrads& grads);

struct TrainLogEntry {
    int epoch;
    double residual, boundary, data, total;
};

struct TrainResult {
    MlpNet net;
    std::vector<TrainLogEntry> log;
};

// Fixed seeded collocation set, shuffled minibatches, Adam
// (0.9, 0.999, 1e-8). Deterministic for a fixed seed.
TrainResult train(const DynamicalSystem& sys, const Dataset& data,
                  const TrainConfig& cfg);

// Text format: "zubovnet v1" / layer dims / "alpha <v>" / per layer one
// line per weight row then one bias line, 17 significant digits.
void save_net(const MlpNet& net, const std::string& path);
MlpNet load_net(const std::string& path);

void save_training_log(const std::vector<TrainLogEntry>& log, const std::string& path);

}  // namespace roa
