#pragma once

#include <string>
#include <vector>

namespace molcf {

// Monotone map from raw uncertainty to absolute-error scale. Piecewise linear
// between breakpoints, clamped to the end values outside the fitted range.
struct IsotonicMap {
    std::vector<double> breakpoints;   // strictly ascending raw values
    std::vector<double> values;        // non-decreasing calibrated values
    bool constant_fallback = false;    // set when < 2 distinct raw values were seen

    std::string to_text() const;
    static IsotonicMap from_text(const std::string& text);
};

// Pool-adjacent-violators fit of abs_error against sigma2_raw. Ties in the raw
// value are pre-averaged. Fewer than two distinct raw values produce a constant
// map at the mean error (constant_fallback flag set).
IsotonicMap fit_isotonic(const std::vector<std::pair<double, double>>& pairs);

// Piecewise-linear evaluation, clamped outside the breakpoint range.
double apply(const IsotonicMap& map, double sigma2_raw);

}  // namespace molcf
