#include "molcf/calibrate.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace molcf {

IsotonicMap fit_isotonic(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2) throw std::invalid_argument("fit_isotonic needs at least 2 pairs");
    for (const auto& [x, e] : pairs) {
        (void)x;
        if (e < 0) throw std::invalid_argument("abs_error must be >= 0");
    }
    std::vector<std::pair<double, double>> sorted = pairs;
    std::sort(sorted.begin(), sorted.end());

    // pre-average ties in the raw value
    std::vector<double> xs, ys, ws;
    for (std::size_t k = 0; k < sorted.size();) {
        std::size_t j = k;
        double sum = 0.0;
        while (j < sorted.size() && sorted[j].first == sorted[k].first) {
            sum += sorted[j].second;
            ++j;
        }
        xs.push_back(sorted[k].first);
        ys.push_back(sum / static_cast<double>(j - k));
        ws.push_back(static_cast<double>(j - k));
        k = j;
    }

    IsotonicMap map;
    if (xs.size() < 2) {
        std::cerr << "fit_isotonic: fewer than 2 distinct raw values, using constant map\n";
        map.breakpoints = {xs[0]};
        map.values = {ys[0]};
        map.constant_fallback = true;
        return map;
    }

    // weighted PAVA: blocks of (value, weight), merged while decreasing
    struct PavaBlock {
        double value;
        double weight;
        std::size_t count;
    };
    std::vector<PavaBlock> blocks;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        blocks.push_back({ys[k], ws[k], 1});
        while (blocks.size() >= 2 && blocks[blocks.size() - 2].value > blocks.back().value) {
            PavaBlock b = blocks.back();
            blocks.pop_back();
            PavaBlock& a = blocks.back();
            a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
            a.weight += b.weight;
            a.count += b.count;
        }
    }
    map.breakpoints = xs;
    map.values.reserve(xs.size());
    for (const PavaBlock& b : blocks)
        for (std::size_t k = 0; k < b.count; ++k) map.values.push_back(b.value);
    return map;
}

double apply(const IsotonicMap& map, double sigma2_raw) {
    const auto& xs = map.breakpoints;
    const auto& vs = map.values;
    if (xs.empty()) throw std::invalid_argument("isotonic map is empty");
    if (sigma2_raw <= xs.front()) return vs.front();
    if (sigma2_raw >= xs.back()) return vs.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), sigma2_raw);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t lo = hi - 1;
    double t = (sigma2_raw - xs[lo]) / (xs[hi] - xs[lo]);
    return vs[lo] + t * (vs[hi] - vs[lo]);
}

std::string IsotonicMap::to_text() const {
    std::ostringstream out;
    out << "# molcf-isotonic v1" << (constant_fallback ? " constant" : "") << "\n";
    char buf[40];
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%a", breakpoints[k]);
        out << buf << " ";
        std::snprintf(buf, sizeof(buf), "%a", values[k]);
        out << buf << "\n";
    }
    return out.str();
}

IsotonicMap IsotonicMap::from_text(const std::string& text) {
    IsotonicMap map;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# molcf-isotonic v1", 0) != 0)
        throw std::invalid_argument("unrecognized isotonic map header");
    map.constant_fallback = line.find("constant") != std::string::npos;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        ls >> a >> b;
        map.breakpoints.push_back(std::strtod(a.c_str(), nullptr));
        map.values.push_back(std::strtod(b.c_str(), nullptr));
    }
    return map;
}

}  // namespace molcf
