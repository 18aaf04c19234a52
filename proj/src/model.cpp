#include "molcf/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include "molcf/rng.hpp"
#include "molcf/smiles.hpp"

namespace molcf {

namespace {

constexpr int kFeatureDim = kNumElements + 2;
// Input scaling keeps the atomic-weight column on the same footing as the one-hots.
constexpr double kFeatureScale[kFeatureDim] = {1.0, 1.0, 1.0, 1.0, 0.05, 1.0};
constexpr double kSigmaFloor = 1e-6;
constexpr double kMomentum = 0.9;

struct Block {
    int rows;
    int cols;
};

std::vector<Block> layout_blocks(const RegressorConfig& rc, bool mve) {
    std::vector<Block> blocks;
    const int H = rc.hidden_dim;
    for (int l = 0; l < rc.layers; ++l) {
        const int in = l == 0 ? kFeatureDim : H;
        switch (rc.architecture) {
            case Architecture::gcn:
                blocks.push_back({in, H});
                blocks.push_back({1, H});
                break;
            case Architecture::gin:
                blocks.push_back({in, H});
                blocks.push_back({1, H});
                blocks.push_back({H, H});
                blocks.push_back({1, H});
                break;
            case Architecture::gatv2lite:
                blocks.push_back({in, H});
                blocks.push_back({in, H});
                blocks.push_back({1, H});
                blocks.push_back({1, H});
                break;
        }
    }
    const int heads = mve ? 2 : 1;
    for (int h = 0; h < heads; ++h) {
        blocks.push_back({H, H});
        blocks.push_back({1, H});
        blocks.push_back({H, 1});
        blocks.push_back({1, 1});
    }
    return blocks;
}

void check_layout(const ModelParams& params, const RegressorConfig& rc) {
    if (params.values.size() != param_count(rc, params.mve))
        throw TrainingError("parameter layout mismatch: have " +
                            std::to_string(params.values.size()) + ", expected " +
                            std::to_string(param_count(rc, params.mve)));
}

// Wires one sample's forward ops onto the tape. `param_ids` follows layout order.
struct ForwardIds {
    int yhat;
    int sigma2;     // -1 when not an MVE model
    int embedding;
};

ForwardIds build_forward(ad::Tape& tape, const std::vector<int>& param_ids,
                         const RegressorConfig& rc, bool mve, const CompiledGraph& cg) {
    int p = 0;
    int h = tape.input(cg.features);
    for (int l = 0; l < rc.layers; ++l) {
        switch (rc.architecture) {
            case Architecture::gcn: {
                int W = param_ids[p++];
                int b = param_ids[p++];
                int agg = tape.neighbor_sum(h, cg.mean_nbrs);
                h = tape.tanh_op(tape.add_rowvec(tape.matmul(agg, W), b));
                break;
            }
            case Architecture::gin: {
                int W1 = param_ids[p++];
                int b1 = param_ids[p++];
                int W2 = param_ids[p++];
                int b2 = param_ids[p++];
                int agg = tape.neighbor_sum(h, cg.sum_nbrs);
                int hidden = tape.tanh_op(tape.add_rowvec(tape.matmul(agg, W1), b1));
                h = tape.tanh_op(tape.add_rowvec(tape.matmul(hidden, W2), b2));
                break;
            }
            case Architecture::gatv2lite: {
                int Ws = param_ids[p++];
                int Wt = param_ids[p++];
                int a = param_ids[p++];
                int b = param_ids[p++];
                int S = tape.matmul(h, Ws);
                int T = tape.matmul(h, Wt);
                int agg = tape.gat_aggregate(S, T, a, cg.sum_nbrs);
                h = tape.tanh_op(tape.add_rowvec(agg, b));
                break;
            }
        }
    }
    int pooled = tape.sum_rows(h);

    auto head = [&](int in) {
        int Wh = param_ids[p++];
        int bh = param_ids[p++];
        int wo = param_ids[p++];
        int bo = param_ids[p++];
        int hid = tape.tanh_op(tape.add_rowvec(tape.matmul(in, Wh), bh));
        return tape.add_rowvec(tape.matmul(hid, wo), bo);
    };
    int yhat = head(pooled);
    int sigma2 = -1;
    if (mve) sigma2 = tape.add_const(tape.softplus_op(head(pooled)), kSigmaFloor);
    return {yhat, sigma2, pooled};
}

std::vector<int> push_params(ad::Tape& tape, const ModelParams& params,
                             const RegressorConfig& rc) {
    std::vector<int> ids;
    std::size_t off = 0;
    for (const Block& blk : layout_blocks(rc, params.mve)) {
        ad::Mat m(blk.rows, blk.cols);
        for (std::size_t k = 0; k < m.size(); ++k) m.a[k] = params.values[off + k];
        off += m.size();
        ids.push_back(tape.input(std::move(m)));
    }
    return ids;
}

std::vector<double> collect_param_grads(const ad::Tape& tape, const std::vector<int>& ids,
                                        std::size_t total) {
    std::vector<double> grad(total);
    std::size_t off = 0;
    for (int id : ids) {
        const ad::Mat& g = tape.grad(id);
        for (std::size_t k = 0; k < g.size(); ++k) grad[off + k] = g.a[k];
        off += g.size();
    }
    return grad;
}

ModelParams run_training(const std::vector<const CompiledGraph*>& graphs,
                         const std::vector<double>& targets, const RegressorConfig& rc,
                         const TrainConfig& tc, std::uint64_t seed, bool mve,
                         const EpochObserver& observer) {
    if (graphs.empty()) throw TrainingError("empty training set");
    if (graphs.size() != targets.size()) throw TrainingError("graphs/targets size mismatch");
    if (tc.epochs < 0 || tc.learning_rate <= 0 || tc.batch_size < 1 || tc.grad_clip_norm <= 0)
        throw TrainingError("invalid training configuration");
    if (mve) {
        if (!tc.mve) throw TrainingError("mve training requires tc.mve");
        if (tc.mve->warmup_epochs >= tc.epochs && tc.epochs > 0)
            throw TrainingError("mve warmup_epochs must be < epochs");
    }

    ModelParams params = init_params(rc, mve, seed);
    std::vector<double> velocity(params.values.size(), 0.0);
    std::mt19937_64 shuffle_rng(splitmix64(seed ^ 0x5bf0364cULL));
    const double beta = mve ? tc.mve->beta : 0.0;

    std::vector<int> order(graphs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        const bool use_mve_loss = mve && epoch >= tc.mve->warmup_epochs;
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
            std::size_t end = std::min(order.size(), start + tc.batch_size);
            std::vector<const CompiledGraph*> batch;
            std::vector<double> ys;
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(graphs[order[k]]);
                ys.push_back(targets[order[k]]);
            }
            auto [loss, grad] = loss_and_gradient(params, rc, batch, ys,
                                                  use_mve_loss ? LossKind::mve : LossKind::mse,
                                                  beta);
            if (!std::isfinite(loss))
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                                    ", batch offset " + std::to_string(start));
            double norm2 = 0.0;
            for (double g : grad) norm2 += g * g;
            double norm = std::sqrt(norm2);
            double scale = norm > tc.grad_clip_norm ? tc.grad_clip_norm / norm : 1.0;
            for (std::size_t k = 0; k < grad.size(); ++k) {
                velocity[k] = kMomentum * velocity[k] + scale * grad[k];
                params.values[k] -= tc.learning_rate * velocity[k];
            }
        }
        if (observer) observer(epoch, params);
    }
    return params;
}

}  // namespace

Architecture architecture_from_string(const std::string& s) {
    if (s == "gcn") return Architecture::gcn;
    if (s == "gin") return Architecture::gin;
    if (s == "gatv2lite") return Architecture::gatv2lite;
    throw std::invalid_argument("unknown architecture: " + s);
}

std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::gcn: return "gcn";
        case Architecture::gin: return "gin";
        case Architecture::gatv2lite: return "gatv2lite";
    }
    return "?";
}

std::size_t param_count(const RegressorConfig& rc, bool mve) {
    std::size_t total = 0;
    for (const Block& b : layout_blocks(rc, mve))
        total += static_cast<std::size_t>(b.rows) * b.cols;
    return total;
}

ModelParams init_params(const RegressorConfig& rc, bool mve, std::uint64_t seed) {
    if (rc.layers < 1 || rc.hidden_dim < 1) throw TrainingError("invalid regressor config");
    ModelParams params;
    params.mve = mve;
    params.values.reserve(param_count(rc, mve));
    std::mt19937_64 rng(seed);
    for (const Block& b : layout_blocks(rc, mve)) {
        // scalar output biases start at zero; everything else U(-1/sqrt(fan), 1/sqrt(fan))
        const bool scalar_bias = b.rows == 1 && b.cols == 1;
        double bound = 1.0 / std::sqrt(static_cast<double>(b.rows == 1 ? b.cols : b.rows));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (int k = 0; k < b.rows * b.cols; ++k)
            params.values.push_back(scalar_bias ? 0.0 : dist(rng));
    }
    return params;
}

CompiledGraph compile_graph(const MolecularGraph& g) {
    MolecularGraph canon = canonical_form(g);
    CompiledGraph cg;
    cg.n = canon.num_atoms();
    cg.features = ad::Mat(cg.n, kFeatureDim);
    auto feats = canon.node_features();
    for (int i = 0; i < cg.n; ++i)
        for (int j = 0; j < kFeatureDim; ++j)
            cg.features.at(i, j) = feats[i][j] * kFeatureScale[j];

    cg.mean_nbrs.resize(cg.n);
    cg.sum_nbrs.resize(cg.n);
    for (int i = 0; i < cg.n; ++i) {
        double wsum = 1.0;
        for (auto [j, o] : canon.neighbors(i)) {
            (void)j;
            wsum += o;
        }
        cg.mean_nbrs[i].emplace_back(i, 1.0 / wsum);
        cg.sum_nbrs[i].emplace_back(i, 1.0);
        for (auto [j, o] : canon.neighbors(i)) {
            cg.mean_nbrs[i].emplace_back(j, o / wsum);
            cg.sum_nbrs[i].emplace_back(j, static_cast<double>(o));
        }
    }
    return cg;
}

Prediction forward(const ModelParams& params, const RegressorConfig& rc, const CompiledGraph& cg) {
    check_layout(params, rc);
    ad::Tape tape;
    std::vector<int> ids = push_params(tape, params, rc);
    ForwardIds f = build_forward(tape, ids, rc, params.mve, cg);
    Prediction pred;
    pred.y_hat = tape.val(f.yhat).at(0, 0);
    if (f.sigma2 >= 0) pred.sigma2 = tape.val(f.sigma2).at(0, 0);
    pred.embedding = tape.val(f.embedding).a;
    return pred;
}

Prediction forward(const ModelParams& params, const RegressorConfig& rc, const MolecularGraph& g) {
    CompiledGraph cg = compile_graph(g);
    return forward(params, rc, cg);
}

std::vector<double> embed(const ModelParams& params, const RegressorConfig& rc,
                          const MolecularGraph& g) {
    return forward(params, rc, g).embedding;
}

std::pair<double, std::vector<double>> loss_and_gradient(
    const ModelParams& params, const RegressorConfig& rc,
    const std::vector<const CompiledGraph*>& graphs, const std::vector<double>& targets,
    LossKind kind, double beta) {
    check_layout(params, rc);
    ad::Tape tape;
    std::vector<int> ids = push_params(tape, params, rc);
    int total = -1;
    for (std::size_t s = 0; s < graphs.size(); ++s) {
        ForwardIds f = build_forward(tape, ids, rc, params.mve, *graphs[s]);
        ad::Mat y(1, 1);
        y.at(0, 0) = targets[s];
        int y_id = tape.input(std::move(y));
        int sample_loss;
        if (kind == LossKind::mse || f.sigma2 < 0) {
            sample_loss = tape.square(tape.sub(f.yhat, y_id));
        } else {
            // sg(sigma^2beta)/2 * ((y - yhat)^2 / sigma^2 + log sigma^2); the scale
            // factor is read off the current value and enters as a constant.
            double sg = std::pow(tape.val(f.sigma2).at(0, 0), beta);
            int sq = tape.square(tape.sub(f.yhat, y_id));
            int term = tape.add(tape.mul(sq, tape.inv_op(f.sigma2)), tape.log_op(f.sigma2));
            sample_loss = tape.scale(term, 0.5 * sg);
        }
        total = total < 0 ? sample_loss : tape.add(total, sample_loss);
    }
    int mean_loss = tape.scale(total, 1.0 / static_cast<double>(graphs.size()));
    tape.backward(mean_loss);
    return {tape.val(mean_loss).at(0, 0),
            collect_param_grads(tape, ids, params.values.size())};
}

std::vector<double> yhat_gradient(const ModelParams& params, const RegressorConfig& rc,
                                  const MolecularGraph& g) {
    check_layout(params, rc);
    CompiledGraph cg = compile_graph(g);
    ad::Tape tape;
    std::vector<int> ids = push_params(tape, params, rc);
    ForwardIds f = build_forward(tape, ids, rc, params.mve, cg);
    tape.backward(f.yhat);
    return collect_param_grads(tape, ids, params.values.size());
}

ModelParams train_mse(const std::vector<const CompiledGraph*>& graphs,
                      const std::vector<double>& targets, const RegressorConfig& rc,
                      const TrainConfig& tc, std::uint64_t seed, const EpochObserver& observer) {
    return run_training(graphs, targets, rc, tc, seed, false, observer);
}

ModelParams train_mve(const std::vector<const CompiledGraph*>& graphs,
                      const std::vector<double>& targets, const RegressorConfig& rc,
                      const TrainConfig& tc, std::uint64_t seed, const EpochObserver& observer) {
    return run_training(graphs, targets, rc, tc, seed, true, observer);
}

std::string save_model(const ModelParams& params, const RegressorConfig& rc) {
    std::ostringstream out;
    out << "molcf-model v1\n";
    out << "arch " << to_string(rc.architecture) << "\n";
    out << "layers " << rc.layers << "\n";
    out << "hidden " << rc.hidden_dim << "\n";
    out << "mve " << (params.mve ? 1 : 0) << "\n";
    out << "params " << params.values.size() << "\n";
    char buf[40];
    for (double v : params.values) {
        std::snprintf(buf, sizeof(buf), "%a", v);
        out << buf << "\n";
    }
    return out.str();
}

std::pair<ModelParams, RegressorConfig> load_model(const std::string& blob) {
    std::istringstream in(blob);
    std::string magic, version, key;
    in >> magic >> version;
    if (magic != "molcf-model" || version != "v1")
        throw TrainingError("unrecognized model checkpoint header");
    RegressorConfig rc;
    ModelParams params;
    std::size_t count = 0;
    std::string arch;
    in >> key >> arch;
    rc.architecture = architecture_from_string(arch);
    in >> key >> rc.layers;
    in >> key >> rc.hidden_dim;
    int mve_flag = 0;
    in >> key >> mve_flag;
    params.mve = mve_flag != 0;
    in >> key >> count;
    params.values.resize(count);
    std::string tok;
    for (std::size_t k = 0; k < count; ++k) {
        if (!(in >> tok)) throw TrainingError("truncated model checkpoint");
        params.values[k] = std::strtod(tok.c_str(), nullptr);
    }
    if (params.values.size() != param_count(rc, params.mve))
        throw TrainingError("checkpoint parameter count mismatch");
    return {std::move(params), rc};
}

}  // namespace molcf
