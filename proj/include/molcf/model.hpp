#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "molcf/graph.hpp"
#include "molcf/tape.hpp"

namespace molcf {

enum class Architecture : std::uint8_t { gcn, gin, gatv2lite };

Architecture architecture_from_string(const std::string& s);
std::string to_string(Architecture a);

struct RegressorConfig {
    Architecture architecture = Architecture::gcn;
    int layers = 3;
    int hidden_dim = 32;
};

struct MveConfig {
    double beta = 0.5;
    int warmup_epochs = 0;
};

struct TrainConfig {
    int epochs = 200;
    double learning_rate = 0.01;
    int batch_size = 32;
    double grad_clip_norm = 5.0;
    std::optional<MveConfig> mve;
};

// Flat parameter vector. Block layout, in order (W matrices stored input x output):
//   per layer l (in = 6 for l = 0, else hidden):
//     gcn:       W[in x H], b[1 x H]
//     gin:       W1[in x H], b1[1 x H], W2[H x H], b2[1 x H]
//     gatv2lite: Ws[in x H], Wt[in x H], a[1 x H], b[1 x H]
//   value head:  Wh[H x H], bh[1 x H], wo[H x 1], bo[1 x 1]
//   mve variant appends a second head with the same shapes; its output passes
//   through softplus with a 1e-6 floor.
struct ModelParams {
    std::vector<double> values;
    bool mve = false;
};

struct Prediction {
    double y_hat = 0.0;
    std::optional<double> sigma2;
    std::vector<double> embedding;
};

std::size_t param_count(const RegressorConfig& rc, bool mve);
ModelParams init_params(const RegressorConfig& rc, bool mve, std::uint64_t seed);

// Graph pre-lowered for message passing: canonical node order, bond-order weighted
// neighbor lists, scaled feature matrix. Reused across forward calls; the neighbor
// lists must outlive any tape built on them.
struct CompiledGraph {
    int n = 0;
    ad::Mat features;
    ad::NeighborLists mean_nbrs;   // gcn: self + neighbors, weights sum to 1
    ad::NeighborLists sum_nbrs;    // gin/gat: self weight 1, neighbor weight = bond order
};

CompiledGraph compile_graph(const MolecularGraph& g);

// Deterministic, permutation-invariant forward pass (graphs are canonicalized before
// lowering, so relabeled inputs take the same summation order bit for bit).
Prediction forward(const ModelParams& params, const RegressorConfig& rc, const MolecularGraph& g);
Prediction forward(const ModelParams& params, const RegressorConfig& rc, const CompiledGraph& cg);

// Pooled pre-head representation (dimension = hidden_dim).
std::vector<double> embed(const ModelParams& params, const RegressorConfig& rc,
                          const MolecularGraph& g);

enum class LossKind : std::uint8_t { mse, mve };

// Mean loss over the batch and its gradient w.r.t. params. For LossKind::mve the
// sg(sigma^2beta) factor is treated as a constant, matching the stop-gradient
// semantics of the training objective.
std::pair<double, std::vector<double>> loss_and_gradient(
    const ModelParams& params, const RegressorConfig& rc,
    const std::vector<const CompiledGraph*>& graphs, const std::vector<double>& targets,
    LossKind kind, double beta);

// d y_hat / d params for a single graph (used by gradient checks).
std::vector<double> yhat_gradient(const ModelParams& params, const RegressorConfig& rc,
                                  const MolecularGraph& g);

class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

using EpochObserver = std::function<void(int epoch, const ModelParams& params)>;

// Mini-batch SGD with momentum 0.9 and global gradient-norm clipping. Deterministic
// for a fixed seed. The observer, when set, runs after every epoch.
ModelParams train_mse(const std::vector<const CompiledGraph*>& graphs,
                      const std::vector<double>& targets, const RegressorConfig& rc,
                      const TrainConfig& tc, std::uint64_t seed,
                      const EpochObserver& observer = nullptr);

// MSE warm-up for tc.mve->warmup_epochs epochs, then the beta-scaled MVE loss.
ModelParams train_mve(const std::vector<const CompiledGraph*>& graphs,
                      const std::vector<double>& targets, const RegressorConfig& rc,
                      const TrainConfig& tc, std::uint64_t seed,
                      const EpochObserver& observer = nullptr);

// Versioned text checkpoint; hexfloat payload round-trips bit-exactly.
std::string save_model(const ModelParams& params, const RegressorConfig& rc);
std::pair<ModelParams, RegressorConfig> load_model(const std::string& blob);

}  // namespace molcf
