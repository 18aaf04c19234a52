#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "molcf/calibrate.hpp"
#include "molcf/config.hpp"
#include "molcf/counterfactual.hpp"
#include "molcf/metrics.hpp"
#include "molcf/split.hpp"
#include "molcf/uq.hpp"

namespace molcf {

inline constexpr const char* kVersion = "0.1.0";

struct CfStageOptions {
    bool enabled = true;
    int n_originals = 50;
    int top_k = 10;
    double retention = 0.2;
    RankMode rank_mode = RankMode::absolute;
};

struct ExperimentConfig {
    std::string dataset_source = "synthetic";   // synthetic | jsonl | smiles
    std::string dataset_path;
    int dataset_n = 2000;
    int dataset_max_steps = 12;
    std::vector<std::string> dataset_seeds;

    SplitSpec split_spec;
    RegressorConfig rc;
    TrainConfig tc;
    EstimatorKind estimator;
    CfStageOptions cf;

    int repetitions = 3;
    std::uint64_t master_seed = 7;
    std::string out_dir = "out";

    Config raw;

    static ExperimentConfig from_config(const Config& cfg);
};

struct RepMetrics {
    double r2 = 0.0;
    double rho = 0.0;
    bool rho_defined = true;
    bool rho_on_raw = false;   // calibrated uncertainties were constant, raw used
    double uer_auc_mean = 0.0;
    double uer_auc_max = 0.0;
    double rll = 0.0;
    bool rll_defined = true;
};

struct CfMetrics {
    double rho = 0.0;
    bool rho_defined = true;
    double uer_auc_mean = 0.0;
    double tr_initial = 0.0;
    bool tr_initial_defined = true;
    double tr_filtered = 0.0;
    bool tr_filtered_defined = true;
    double tr_gain = 0.0;
    bool tr_gain_defined = true;
    double xi20 = 0.0;
    int n_records = 0;
    int n_retained = 0;
};

struct EvalArtifact {
    std::string smiles;
    double y = 0.0;
    double y_hat = 0.0;
    double sigma2_raw = 0.0;
    double sigma2_cal = 0.0;
};

struct RepetitionResult {
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    RepMetrics metrics;
    bool cf_present = false;
    CfMetrics cf;
    std::vector<EvalArtifact> eval_records;
    std::vector<CounterfactualRecord> cf_records;
};

struct ExperimentReport {
    nlohmann::json report;
    std::vector<RepetitionResult> reps;
};

// Loads or synthesizes the dataset named by the config (deterministic for a fixed
// master seed).
std::vector<LabeledSample> load_dataset(const ExperimentConfig& cfg);

// Full protocol per repetition: split, fit, calibrate, evaluate, optional
// counterfactual stage; writes report.json, JSONL artifacts and curve CSVs into
// out_dir. Failed repetitions are recorded in the report, not fatal.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Curve CSVs from persisted repetition results (per repetition and averaged).
void emit_curves(const ExperimentConfig& cfg, const std::vector<RepetitionResult>& reps,
                 const std::string& out_dir);

struct CfStageResult {
    std::vector<CounterfactualRecord> records;
    CfMetrics metrics;
};

using ScalarFn = std::function<double(const MolecularGraph&)>;
using CalibrateFn = std::function<double(double)>;

// Counterfactual stage with injectable model surfaces: rank the 1-edit neighborhood
// of each original by prediction divergence, label via the oracle function, filter
// at the threshold retaining `retention` of the test uncertainties. Filtering and
// xi20 act on calibrated uncertainties; UER/rho integrate the raw ones (their
// ranking is identical, and raw values keep the spread the normalization needs).
CfStageResult run_counterfactual_stage(const std::vector<const LabeledSample*>& originals,
                                       const Predictor& predictor,
                                       const ScalarFn& uncertainty_raw,
                                       const CalibrateFn& calibrate, const ScalarFn& oracle_fn,
                                       const std::vector<double>& test_sigma2_cal,
                                       const CfStageOptions& opts);

std::string eval_records_to_jsonl(const std::vector<EvalArtifact>& records);
std::vector<EvalArtifact> eval_records_from_jsonl(const std::string& text);

std::string dataset_to_jsonl(const std::vector<LabeledSample>& samples);
std::vector<LabeledSample> dataset_from_jsonl(const std::string& text);

}  // namespace molcf
