#include "molcf/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace molcf {

namespace {

constexpr double kErrorFloor = 1e-8;   // floor on dy^2 used as a variance argument

double accumulate_errors(std::vector<double>& errors, Accumulator g) {
    if (errors.empty()) return 0.0;
    switch (g) {
        case Accumulator::mean:
            return std::accumulate(errors.begin(), errors.end(), 0.0) /
                   static_cast<double>(errors.size());
        case Accumulator::max:
            return *std::max_element(errors.begin(), errors.end());
        case Accumulator::median: {
            std::size_t m = errors.size() / 2;
            std::nth_element(errors.begin(), errors.begin() + m, errors.end());
            double hi = errors[m];
            if (errors.size() % 2 == 1) return hi;
            double lo = *std::max_element(errors.begin(), errors.begin() + m);
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

}  // namespace

UerCurve uer_curve(const std::vector<EvalRecord>& records, Accumulator g) {
    if (records.empty()) throw MetricError("uer_curve needs at least one record");
    for (const auto& r : records)
        if (r.sigma2 < 0) throw MetricError("negative uncertainty");

    const std::size_t n = records.size();
    double smax = 0.0;
    for (const auto& r : records) smax = std::max(smax, r.sigma2);

    bool all_equal = true;
    for (const auto& r : records)
        if (r.sigma2 != records.front().sigma2) all_equal = false;

    std::vector<double> nu(n);
    for (std::size_t i = 0; i < n; ++i)
        nu[i] = smax > 0.0 ? records[i].sigma2 / smax : 1.0;

    UerCurve curve;
    curve.degenerate = all_equal;

    curve.grid = {0.0, 1.0};
    for (double v : nu) curve.grid.push_back(v);
    std::sort(curve.grid.begin(), curve.grid.end());
    curve.grid.erase(std::unique(curve.grid.begin(), curve.grid.end()), curve.grid.end());

    // sweep in threshold order, re-accumulating the filtered error at each breakpoint
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nu[a] < nu[b]; });

    curve.gamma.resize(curve.grid.size());
    std::vector<double> included;
    std::size_t next = 0;
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        double xi = curve.grid[k];
        while (next < n && nu[order[next]] <= xi) {
            included.push_back(records[order[next]].abs_error());
            ++next;
        }
        std::vector<double> tmp = included;
        curve.gamma[k] = accumulate_errors(tmp, g);
    }

    double gamma_full = curve.gamma.back();
    double gamma_max = *std::max_element(curve.gamma.begin(), curve.gamma.end());

    curve.delta_rel_raw.resize(curve.grid.size());
    curve.delta_rel.resize(curve.grid.size());
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        double raw = gamma_max > 0.0 ? (gamma_full - curve.gamma[k]) / gamma_max : 0.0;
        curve.delta_rel_raw[k] = raw;
        double clamped = std::min(1.0, std::max(0.0, raw));
        if (raw != clamped) ++curve.out_of_range_count;
        curve.delta_rel[k] = clamped;
    }

    curve.auc = 0.0;
    for (std::size_t k = 0; k + 1 < curve.grid.size(); ++k)
        curve.auc += curve.delta_rel[k] * (curve.grid[k + 1] - curve.grid[k]);
    return curve;
}

double pearson_rho(const std::vector<double>& errors, const std::vector<double>& sigmas) {
    if (errors.size() != sigmas.size()) throw MetricError("pearson_rho length mismatch");
    const std::size_t n = errors.size();
    if (n < 2) throw MetricError("pearson_rho needs at least 2 samples");
    double me = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
    double ms = std::accumulate(sigmas.begin(), sigmas.end(), 0.0) / n;
    double see = 0.0, sss = 0.0, ses = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double de = errors[i] - me;
        double ds = sigmas[i] - ms;
        see += de * de;
        sss += ds * ds;
        ses += de * ds;
    }
    if (see == 0.0 || sss == 0.0) throw MetricError("pearson_rho undefined for constant input");
    return ses / std::sqrt(see * sss);
}

double nll(double delta_y, double variance) {
    if (variance <= 0.0) throw MetricError("nll requires positive variance");
    constexpr double two_pi = 6.283185307179586476925286766559;
    return 0.5 * (delta_y * delta_y / variance + std::log(two_pi * variance));
}

RllResult rll(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw MetricError("rll needs at least one record");
    double mse = 0.0;
    for (const auto& r : records) {
        double dy = r.abs_error();
        mse += dy * dy;
    }
    mse /= static_cast<double>(records.size());
    const double rmse2 = std::max(mse, kErrorFloor);

    double num = 0.0, den = 0.0;
    for (const auto& r : records) {
        double dy = r.y_hat - r.y;
        double base = nll(dy, rmse2);
        num += nll(dy, r.sigma2) - base;
        den += nll(dy, std::max(dy * dy, kErrorFloor)) - base;
    }
    RllResult res;
    if (den == 0.0) {
        res.defined = false;
        return res;
    }
    res.value = num / den;
    return res;
}

int truthful(const EvalRecord& original, const EvalRecord& counterfactual) {
    double e0 = original.abs_error();
    double e1 = counterfactual.abs_error();
    double lo0 = original.y - e0, hi0 = original.y + e0;
    double lo1 = counterfactual.y - e1, hi1 = counterfactual.y + e1;
    bool overlap = std::max(lo0, lo1) <= std::min(hi0, hi1);
    return overlap ? 0 : 1;
}

TruthfulnessResult relative_truthfulness(const std::vector<int>& bits) {
    TruthfulnessResult res;
    if (bits.empty()) {
        res.defined = false;
        return res;
    }
    res.value = std::accumulate(bits.begin(), bits.end(), 0.0) / static_cast<double>(bits.size());
    return res;
}

RetentionThreshold retention_threshold(const std::vector<double>& sigmas, double fraction) {
    if (sigmas.empty()) throw MetricError("retention_threshold needs at least one value");
    if (fraction <= 0.0 || fraction > 1.0) throw MetricError("fraction must be in (0, 1]");
    std::vector<double> sorted = sigmas;
    std::sort(sorted.begin(), sorted.end());
    std::size_t k = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(sorted.size())));
    k = std::max<std::size_t>(1, std::min(k, sorted.size()));
    RetentionThreshold res;
    res.xi = sorted[k - 1];
    res.retained = static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), res.xi) -
                                    sorted.begin());
    res.ties = res.retained > static_cast<int>(k);
    return res;
}

double r_squared(const std::vector<double>& ys, const std::vector<double>& y_hats) {
    if (ys.size() != y_hats.size()) throw MetricError("r_squared length mismatch");
    if (ys.size() < 2) throw MetricError("r_squared needs at least 2 samples");
    double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
        ss_res += (ys[i] - y_hats[i]) * (ys[i] - y_hats[i]);
    }
    if (ss_tot == 0.0) throw MetricError("r_squared undefined for constant targets");
    return 1.0 - ss_res / ss_tot;
}

}  // namespace molcf
