#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace molcf {

struct EvalRecord {
    double y = 0.0;
    double y_hat = 0.0;
    double sigma2 = 0.0;

    double abs_error() const { return std::fabs(y - y_hat); }
};

enum class Accumulator { mean, max, median };

// Relative error-reduction curve over normalized uncertainty thresholds. The grid
// holds every distinct normalized sigma^2 plus the endpoints 0 and 1, so the step
// curve is exact. delta_rel is clamped to [0, 1]; raw values are kept alongside and
// out-of-range occurrences are counted rather than hidden.
struct UerCurve {
    std::vector<double> grid;
    std::vector<double> gamma;
    std::vector<double> delta_rel;       // clamped to [0, 1]
    std::vector<double> delta_rel_raw;
    double auc = 0.0;
    int out_of_range_count = 0;
    bool degenerate = false;             // all uncertainties equal (or all zero)
};

class MetricError : public std::runtime_error {
public:
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Cumulative filtered error Gamma^g(xi) with inclusive thresholds (sigma^2 /
// sigma^2_max <= xi) so Gamma(1) covers the full set; Gamma of the empty set is 0.
// AUC integrates the left-continuous step function exactly.
UerCurve uer_curve(const std::vector<EvalRecord>& records, Accumulator g);

double pearson_rho(const std::vector<double>& errors, const std::vector<double>& sigmas);

// 1/2 (dy^2 / sigma^2 + log 2 pi sigma^2); variance must be positive.
double nll(double delta_y, double variance);

// Relative log likelihood in (-inf, 1]: 1 at per-sample-optimal variance
// (sigma_i^2 = dy_i^2), 0 at the constant-RMSE^2 baseline. dy^2 arguments are
// floored at 1e-8 to avoid log 0.
struct RllResult {
    double value = 0.0;
    bool defined = true;
};
RllResult rll(const std::vector<EvalRecord>& records);

// 1 iff the closed ground-truth error intervals do not intersect; touching
// endpoints count as overlap.
int truthful(const EvalRecord& original, const EvalRecord& counterfactual);

// Mean of truthful bits; empty input is undefined.
struct TruthfulnessResult {
    double value = 0.0;
    bool defined = true;
};
TruthfulnessResult relative_truthfulness(const std::vector<int>& bits);

// Threshold retaining the ceil(fraction * n) smallest uncertainties; ties at the
// threshold may retain more (tie flag set).
struct RetentionThreshold {
    double xi = 0.0;
    int retained = 0;
    bool ties = false;
};
RetentionThreshold retention_threshold(const std::vector<double>& sigmas, double fraction);

double r_squared(const std::vector<double>& ys, const std::vector<double>& y_hats);

}  // namespace molcf
