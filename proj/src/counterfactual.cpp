#include "molcf/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "molcf/smiles.hpp"

namespace molcf {

using nlohmann::json;

std::vector<CounterfactualRecord> rank_counterfactuals(const Predictor& model,
                                                       const MolecularGraph& g,
                                                       const std::vector<MolecularGraph>& candidates,
                                                       int top_k, RankMode mode) {
    if (candidates.empty()) throw std::invalid_argument("rank_counterfactuals needs candidates");
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");

    const double y_hat = model(g);
    const std::string original_smiles = write_smiles(g);

    std::vector<CounterfactualRecord> records;
    records.reserve(candidates.size());
    for (const auto& c : candidates) {
        double yp = model(c);
        if (mode == RankMode::higher && !(yp > y_hat)) continue;
        if (mode == RankMode::lower && !(yp < y_hat)) continue;
        CounterfactualRecord r{original_smiles, write_smiles(c), c};
        r.y_hat = y_hat;
        r.y_hat_prime = yp;
        r.divergence = std::fabs(yp - y_hat);
        records.push_back(std::move(r));
    }
    std::sort(records.begin(), records.end(),
              [](const CounterfactualRecord& a, const CounterfactualRecord& b) {
                  if (a.divergence != b.divergence) return a.divergence > b.divergence;
                  return a.perturbed_smiles < b.perturbed_smiles;
              });
    if (static_cast<int>(records.size()) > top_k)
        records.erase(records.begin() + top_k, records.end());
    return records;
}

std::vector<CounterfactualRecord> filter_by_uncertainty(
    const std::vector<CounterfactualRecord>& records, double xi) {
    std::vector<CounterfactualRecord> kept;
    for (const auto& r : records)
        if (r.sigma2_prime <= xi) kept.push_back(r);
    return kept;
}

std::string counterfactuals_to_jsonl(const std::vector<CounterfactualRecord>& records) {
    std::ostringstream out;
    out << json{{"schema", "molcf-cf-v1"}}.dump() << "\n";
    for (const auto& r : records) {
        json j;
        j["original"] = r.original_smiles;
        j["perturbed"] = r.perturbed_smiles;
        j["y"] = r.y;
        j["y_hat"] = r.y_hat;
        j["y_hat_prime"] = r.y_hat_prime;
        j["divergence"] = r.divergence;
        j["sigma2_prime"] = r.sigma2_prime;
        j["sigma2_prime_raw"] = r.sigma2_prime_raw;
        if (r.y_prime) j["y_prime"] = *r.y_prime;
        if (r.truthful_bit) j["truthful"] = *r.truthful_bit;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<CounterfactualRecord> counterfactuals_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || json::parse(line).value("schema", "") != "molcf-cf-v1")
        throw std::invalid_argument("unrecognized counterfactual jsonl schema");
    std::vector<CounterfactualRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        CounterfactualRecord r{j.at("original"), j.at("perturbed"),
                               parse_smiles(j.at("perturbed").get<std::string>())};
        r.y = j.at("y");
        r.y_hat = j.at("y_hat");
        r.y_hat_prime = j.at("y_hat_prime");
        r.divergence = j.at("divergence");
        r.sigma2_prime = j.at("sigma2_prime");
        r.sigma2_prime_raw = j.value("sigma2_prime_raw", r.sigma2_prime);
        if (j.contains("y_prime")) r.y_prime = j.at("y_prime").get<double>();
        if (j.contains("truthful")) r.truthful_bit = j.at("truthful").get<int>();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace molcf
