#pragma once

#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "molcf/fingerprint.hpp"
#include "molcf/model.hpp"
#include "molcf/oracle.hpp"

namespace molcf {

enum class UqMethod : std::uint8_t {
    random,
    de,
    mve,
    de_mve,
    swag,
    ts_tanimoto,
    ts_euclidean,
};

UqMethod uq_method_from_string(const std::string& s);
std::string to_string(UqMethod m);

struct EstimatorKind {
    UqMethod method = UqMethod::de;
    int ensemble_size = 3;
    int swag_window = 25;
    int swag_samples = 50;
};

// Gaussian weight posterior from late-training snapshots: diagonal variance plus a
// low-rank deviation term (columns are snapshot minus mean).
struct SwagPosterior {
    std::vector<double> mu;
    std::vector<double> diag;
    std::vector<std::vector<double>> deviations;
};

struct UncertainPrediction {
    double y_hat = 0.0;
    double sigma2_raw = 0.0;
    std::optional<double> sigma2_calibrated;
};

struct FittedEstimator {
    EstimatorKind kind;
    RegressorConfig rc;
    std::vector<ModelParams> members;          // base model at [0] for random/ts/swag
    SwagPosterior swag;
    std::vector<ModelParams> swag_samples;     // weights drawn once at fit time
    std::vector<Fingerprint> train_fingerprints;
    std::vector<std::vector<double>> train_embeddings;
    mutable std::mt19937_64 rng;               // random baseline only; single-caller

    UncertainPrediction predict(const MolecularGraph& g) const;
};

// Trains the estimator on the given samples. Ensemble members train on independent
// bootstrap resamples, in parallel. Deterministic for a fixed seed.
FittedEstimator fit(const EstimatorKind& kind, const std::vector<LabeledSample>& train_set,
                    const RegressorConfig& rc, const TrainConfig& tc, std::uint64_t seed);

UncertainPrediction predict(const FittedEstimator& est, const MolecularGraph& g);

// Classification-style trust score T = dist(x, nearest same) / dist(x, nearest other).
// Zero denominator yields +infinity with a warning. Kept for reference; the
// regression adaptation (distance to nearest training element) is what predict uses.
template <class T, class Dist>
double trust_score_classification(const T& x, const std::vector<T>& same_class,
                                  const std::vector<T>& other_class, Dist dist) {
    if (same_class.empty() || other_class.empty())
        throw std::invalid_argument("trust score needs non-empty class sets");
    double ds = std::numeric_limits<double>::infinity();
    for (const auto& s : same_class) ds = std::min(ds, dist(x, s));
    double dn = std::numeric_limits<double>::infinity();
    for (const auto& o : other_class) dn = std::min(dn, dist(x, o));
    if (dn == 0.0) {
        std::cerr << "trust_score_classification: zero distance to other class\n";
        return std::numeric_limits<double>::infinity();
    }
    return ds / dn;
}

// Pure combination helpers (also exercised directly by tests).
double ensemble_mean(const std::vector<double>& values);
double population_variance(const std::vector<double>& values);
double combine_de_mve(double de_variance, double mean_mve_variance);

SwagPosterior build_swag_posterior(const std::vector<std::vector<double>>& snapshots);
std::vector<double> sample_swag_weights(const SwagPosterior& posterior, std::mt19937_64& rng);

// Versioned JSON checkpoint; round-trips exactly (hexfloat payloads).
std::string save_estimator(const FittedEstimator& est);
FittedEstimator load_estimator(const std::string& blob);

}  // namespace molcf
