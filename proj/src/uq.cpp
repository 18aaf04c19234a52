#include "molcf/uq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "molcf/rng.hpp"
#include "molcf/smiles.hpp"

namespace molcf {

namespace {

using nlohmann::json;

std::string hexd(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double unhexd(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    return idx;
}

ModelParams train_one(const std::vector<CompiledGraph>& compiled, const std::vector<double>& ys,
                      const std::vector<std::size_t>& indices, const RegressorConfig& rc,
                      const TrainConfig& tc, std::uint64_t seed, bool mve,
                      const EpochObserver& observer = nullptr) {
    std::vector<const CompiledGraph*> graphs;
    std::vector<double> targets;
    graphs.reserve(indices.size());
    for (std::size_t i : indices) {
        graphs.push_back(&compiled[i]);
        targets.push_back(ys[i]);
    }
    return mve ? train_mve(graphs, targets, rc, tc, seed, observer)
               : train_mse(graphs, targets, rc, tc, seed, observer);
}

std::vector<std::size_t> identity_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

}  // namespace

UqMethod uq_method_from_string(const std::string& s) {
    if (s == "random") return UqMethod::random;
    if (s == "de") return UqMethod::de;
    if (s == "mve") return UqMethod::mve;
    if (s == "de_mve") return UqMethod::de_mve;
    if (s == "swag") return UqMethod::swag;
    if (s == "ts_tanimoto") return UqMethod::ts_tanimoto;
    if (s == "ts_euclidean") return UqMethod::ts_euclidean;
    throw std::invalid_argument("unknown uq method: " + s);
}

std::string to_string(UqMethod m) {
    switch (m) {
        case UqMethod::random: return "random";
        case UqMethod::de: return "de";
        case UqMethod::mve: return "mve";
        case UqMethod::de_mve: return "de_mve";
        case UqMethod::swag: return "swag";
        case UqMethod::ts_tanimoto: return "ts_tanimoto";
        case UqMethod::ts_euclidean: return "ts_euclidean";
    }
    return "?";
}

double ensemble_mean(const std::vector<double>& values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double population_variance(const std::vector<double>& values) {
    double mean = ensemble_mean(values);
    double s = 0.0;
    for (double v : values) s += (v - mean) * (v - mean);
    return s / static_cast<double>(values.size());
}

double combine_de_mve(double de_variance, double mean_mve_variance) {
    return 0.5 * (de_variance + mean_mve_variance);
}

SwagPosterior build_swag_posterior(const std::vector<std::vector<double>>& snapshots) {
    if (snapshots.empty()) throw TrainingError("swag posterior needs at least one snapshot");
    const std::size_t dim = snapshots.front().size();
    SwagPosterior post;
    post.mu.assign(dim, 0.0);
    for (const auto& s : snapshots)
        for (std::size_t k = 0; k < dim; ++k) post.mu[k] += s[k];
    for (double& m : post.mu) m /= static_cast<double>(snapshots.size());

    post.diag.assign(dim, 0.0);
    for (const auto& s : snapshots)
        for (std::size_t k = 0; k < dim; ++k) {
            double d = s[k] - post.mu[k];
            post.diag[k] += d * d;
        }
    for (double& d : post.diag) d = std::max(0.0, d / static_cast<double>(snapshots.size()));

    for (const auto& s : snapshots) {
        std::vector<double> dev(dim);
        for (std::size_t k = 0; k < dim; ++k) dev[k] = s[k] - post.mu[k];
        post.deviations.push_back(std::move(dev));
    }
    return post;
}

std::vector<double> sample_swag_weights(const SwagPosterior& posterior, std::mt19937_64& rng) {
    const std::size_t dim = posterior.mu.size();
    const std::size_t K = posterior.deviations.size();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> theta(posterior.mu);
    for (std::size_t k = 0; k < dim; ++k)
        theta[k] += std::sqrt(0.5 * posterior.diag[k]) * gauss(rng);
    if (K > 1) {
        double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(K - 1));
        for (std::size_t j = 0; j < K; ++j) {
            double z = gauss(rng);
            const auto& dev = posterior.deviations[j];
            for (std::size_t k = 0; k < dim; ++k) theta[k] += scale * z * dev[k];
        }
    }
    return theta;
}

FittedEstimator fit(const EstimatorKind& kind, const std::vector<LabeledSample>& train_set,
                    const RegressorConfig& rc, const TrainConfig& tc, std::uint64_t seed) {
    if (train_set.empty()) throw TrainingError("fit requires a non-empty train set");
    if ((kind.method == UqMethod::de || kind.method == UqMethod::de_mve) && kind.ensemble_size < 2)
        throw TrainingError("ensemble_size must be >= 2 for de/de_mve");
    if (kind.method == UqMethod::swag && kind.swag_window > tc.epochs)
        throw TrainingError("swag_window must be <= epochs");

    std::vector<CompiledGraph> compiled;
    compiled.reserve(train_set.size());
    std::vector<double> ys;
    for (const auto& s : train_set) {
        compiled.push_back(compile_graph(s.graph));
        ys.push_back(s.y);
    }

    FittedEstimator est;
    est.kind = kind;
    est.rc = rc;
    est.rng = make_rng(derive_seed(seed, {0x7a}));

    const bool is_ensemble = kind.method == UqMethod::de || kind.method == UqMethod::de_mve;
    if (is_ensemble) {
        const bool mve = kind.method == UqMethod::de_mve;
        est.members.resize(kind.ensemble_size);
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(kind.ensemble_size);
        for (int m = 0; m < kind.ensemble_size; ++m) {
            workers.emplace_back([&, m]() {
                try {
                    auto boot_rng = make_rng(derive_seed(seed, {0x10, static_cast<std::uint64_t>(m)}));
                    auto idx = bootstrap_indices(compiled.size(), boot_rng);
                    est.members[m] = train_one(compiled, ys, idx, rc, tc,
                                               derive_seed(seed, {0x20, static_cast<std::uint64_t>(m)}),
                                               mve);
                } catch (...) {
                    errors[m] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        return est;
    }

    switch (kind.method) {
        case UqMethod::mve:
            est.members.push_back(train_one(compiled, ys, identity_indices(compiled.size()), rc, tc,
                                            derive_seed(seed, {0x21}), true));
            break;
        case UqMethod::swag: {
            std::vector<std::vector<double>> snapshots;
            const int first_snapshot_epoch = tc.epochs - kind.swag_window;
            EpochObserver obs = [&](int epoch, const ModelParams& p) {
                if (epoch >= first_snapshot_epoch) snapshots.push_back(p.values);
            };
            est.members.push_back(train_one(compiled, ys, identity_indices(compiled.size()), rc, tc,
                                            derive_seed(seed, {0x22}), false, obs));
            est.swag = build_swag_posterior(snapshots);
            auto rng = make_rng(derive_seed(seed, {0x30}));
            for (int s = 0; s < kind.swag_samples; ++s) {
                ModelParams p;
                p.mve = false;
                p.values = sample_swag_weights(est.swag, rng);
                est.swag_samples.push_back(std::move(p));
            }
            break;
        }
        case UqMethod::random:
        case UqMethod::ts_tanimoto:
        case UqMethod::ts_euclidean: {
            est.members.push_back(train_one(compiled, ys, identity_indices(compiled.size()), rc, tc,
                                            derive_seed(seed, {0x23}), false));
            if (kind.method == UqMethod::ts_tanimoto) {
                for (const auto& s : train_set)
                    est.train_fingerprints.push_back(morgan_fingerprint(s.graph));
            } else if (kind.method == UqMethod::ts_euclidean) {
                for (std::size_t i = 0; i < compiled.size(); ++i)
                    est.train_embeddings.push_back(
                        forward(est.members[0], rc, compiled[i]).embedding);
            }
            break;
        }
        default: break;
    }
    return est;
}

UncertainPrediction FittedEstimator::predict(const MolecularGraph& g) const {
    return molcf::predict(*this, g);
}

UncertainPrediction predict(const FittedEstimator& est, const MolecularGraph& g) {
    if (est.members.empty()) throw TrainingError("predict on unfitted estimator");
    CompiledGraph cg = compile_graph(g);
    UncertainPrediction out;

    switch (est.kind.method) {
        case UqMethod::de:
        case UqMethod::de_mve: {
            std::vector<double> yhats, mve_vars;
            for (const auto& m : est.members) {
                Prediction p = forward(m, est.rc, cg);
                yhats.push_back(p.y_hat);
                if (p.sigma2) mve_vars.push_back(*p.sigma2);
            }
            out.y_hat = ensemble_mean(yhats);
            double de_var = population_variance(yhats);
            out.sigma2_raw = est.kind.method == UqMethod::de
                                 ? de_var
                                 : combine_de_mve(de_var, ensemble_mean(mve_vars));
            break;
        }
        case UqMethod::mve: {
            Prediction p = forward(est.members[0], est.rc, cg);
            out.y_hat = p.y_hat;
            out.sigma2_raw = p.sigma2.value_or(0.0);
            break;
        }
        case UqMethod::swag: {
            std::vector<double> yhats;
            yhats.reserve(est.swag_samples.size());
            for (const auto& p : est.swag_samples) yhats.push_back(forward(p, est.rc, cg).y_hat);
            out.y_hat = ensemble_mean(yhats);
            out.sigma2_raw = population_variance(yhats);
            break;
        }
        case UqMethod::random: {
            out.y_hat = forward(est.members[0], est.rc, cg).y_hat;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            out.sigma2_raw = unit(est.rng);
            break;
        }
        case UqMethod::ts_tanimoto: {
            out.y_hat = forward(est.members[0], est.rc, cg).y_hat;
            Fingerprint fp = morgan_fingerprint(g);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : est.train_fingerprints)
                best = std::min(best, tanimoto_distance(fp, f));
            out.sigma2_raw = best;
            break;
        }
        case UqMethod::ts_euclidean: {
            Prediction p = forward(est.members[0], est.rc, cg);
            out.y_hat = p.y_hat;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : est.train_embeddings) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < e.size(); ++k) {
                    double d = e[k] - p.embedding[k];
                    d2 += d * d;
                }
                best = std::min(best, std::sqrt(d2));
            }
            out.sigma2_raw = best;
            break;
        }
    }
    return out;
}

std::string save_estimator(const FittedEstimator& est) {
    json j;
    j["schema"] = "molcf-estimator-v1";
    j["method"] = to_string(est.kind.method);
    j["ensemble_size"] = est.kind.ensemble_size;
    j["swag_window"] = est.kind.swag_window;
    j["swag_samples"] = est.kind.swag_samples;
    j["members"] = json::array();
    for (const auto& m : est.members) j["members"].push_back(save_model(m, est.rc));
    j["swag_sampled"] = json::array();
    for (const auto& m : est.swag_samples) j["swag_sampled"].push_back(save_model(m, est.rc));
    j["swag_mu"] = json::array();
    for (double v : est.swag.mu) j["swag_mu"].push_back(hexd(v));
    j["swag_diag"] = json::array();
    for (double v : est.swag.diag) j["swag_diag"].push_back(hexd(v));
    j["swag_dev"] = json::array();
    for (const auto& dev : est.swag.deviations) {
        json row = json::array();
        for (double v : dev) row.push_back(hexd(v));
        j["swag_dev"].push_back(row);
    }
    j["fingerprints"] = json::array();
    for (const auto& fp : est.train_fingerprints) {
        json f;
        f["nbits"] = fp.nbits;
        f["radius"] = fp.radius;
        json words = json::array();
        char buf[24];
        for (std::uint64_t w : fp.words) {
            std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(w));
            words.push_back(buf);
        }
        f["words"] = words;
        j["fingerprints"].push_back(f);
    }
    j["embeddings"] = json::array();
    for (const auto& e : est.train_embeddings) {
        json row = json::array();
        for (double v : e) row.push_back(hexd(v));
        j["embeddings"].push_back(row);
    }
    std::ostringstream rng_state;
    rng_state << est.rng;
    j["rng_state"] = rng_state.str();
    return j.dump();
}

FittedEstimator load_estimator(const std::string& blob) {
    json j = json::parse(blob);
    if (j.at("schema") != "molcf-estimator-v1")
        throw TrainingError("unrecognized estimator checkpoint schema");
    FittedEstimator est;
    est.kind.method = uq_method_from_string(j.at("method"));
    est.kind.ensemble_size = j.at("ensemble_size");
    est.kind.swag_window = j.at("swag_window");
    est.kind.swag_samples = j.at("swag_samples");
    for (const auto& blob_m : j.at("members")) {
        auto [params, rc] = load_model(blob_m.get<std::string>());
        est.rc = rc;
        est.members.push_back(std::move(params));
    }
    for (const auto& blob_m : j.at("swag_sampled")) {
        auto [params, rc] = load_model(blob_m.get<std::string>());
        (void)rc;
        est.swag_samples.push_back(std::move(params));
    }
    for (const auto& v : j.at("swag_mu")) est.swag.mu.push_back(unhexd(v.get<std::string>()));
    for (const auto& v : j.at("swag_diag")) est.swag.diag.push_back(unhexd(v.get<std::string>()));
    for (const auto& row : j.at("swag_dev")) {
        std::vector<double> dev;
        for (const auto& v : row) dev.push_back(unhexd(v.get<std::string>()));
        est.swag.deviations.push_back(std::move(dev));
    }
    for (const auto& f : j.at("fingerprints")) {
        Fingerprint fp;
        fp.nbits = f.at("nbits");
        fp.radius = f.at("radius");
        for (const auto& w : f.at("words"))
            fp.words.push_back(std::strtoull(w.get<std::string>().c_str(), nullptr, 16));
        est.train_fingerprints.push_back(std::move(fp));
    }
    for (const auto& row : j.at("embeddings")) {
        std::vector<double> e;
        for (const auto& v : row) e.push_back(unhexd(v.get<std::string>()));
        est.train_embeddings.push_back(std::move(e));
    }
    std::istringstream rng_state(j.at("rng_state").get<std::string>());
    rng_state >> est.rng;
    return est;
}

}  // namespace molcf
