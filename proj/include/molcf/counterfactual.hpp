#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "molcf/edits.hpp"
#include "molcf/graph.hpp"

namespace molcf {

struct CounterfactualRecord {
    std::string original_smiles;
    std::string perturbed_smiles;
    MolecularGraph perturbed;
    double y = 0.0;              // original ground truth
    double y_hat = 0.0;          // original prediction
    double y_hat_prime = 0.0;
    double divergence = 0.0;         // |y_hat' - y_hat|
    double sigma2_prime = 0.0;       // calibrated uncertainty of the perturbed prediction
    double sigma2_prime_raw = 0.0;   // pre-calibration value (UER curves integrate this)
    std::optional<double> y_prime;
    std::optional<int> truthful_bit;
};

enum class RankMode { absolute, higher, lower };

using Predictor = std::function<double(const MolecularGraph&)>;

// Predicts all candidates, sorts by divergence descending (ties broken by canonical
// SMILES) and keeps the top_k. `higher`/`lower` modes restrict to candidates whose
// prediction moves monotonically in that direction before ranking.
std::vector<CounterfactualRecord> rank_counterfactuals(const Predictor& model,
                                                       const MolecularGraph& g,
                                                       const std::vector<MolecularGraph>& candidates,
                                                       int top_k = 10,
                                                       RankMode mode = RankMode::absolute);

// Keeps records with calibrated sigma^2 <= xi (inclusive), preserving order.
std::vector<CounterfactualRecord> filter_by_uncertainty(
    const std::vector<CounterfactualRecord>& records, double xi);

// JSON-lines serialization (schema header line first).
std::string counterfactuals_to_jsonl(const std::vector<CounterfactualRecord>& records);
std::vector<CounterfactualRecord> counterfactuals_from_jsonl(const std::string& text);

}  // namespace molcf
