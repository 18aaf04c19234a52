#include "molcf/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "molcf/rng.hpp"
#include "molcf/scaffold.hpp"

namespace molcf {

SplitKind split_kind_from_string(const std::string& s) {
    if (s == "iid") return SplitKind::iid;
    if (s == "ood_struct") return SplitKind::ood_struct;
    if (s == "ood_value") return SplitKind::ood_value;
    throw std::invalid_argument("unknown split kind: " + s);
}

std::string to_string(SplitKind k) {
    switch (k) {
        case SplitKind::iid: return "iid";
        case SplitKind::ood_struct: return "ood_struct";
        case SplitKind::ood_value: return "ood_value";
    }
    return "?";
}

namespace {

void validate_spec(const SplitSpec& spec) {
    if (spec.train_frac <= 0 || spec.cal_frac <= 0 || spec.test_frac <= 0)
        throw SplitError("split fractions must be positive");
    double sum = spec.train_frac + spec.cal_frac + spec.test_frac;
    if (std::fabs(sum - 1.0) > 1e-9) throw SplitError("split fractions must sum to 1");
}

void check_nonempty(const SplitResult& r) {
    if (r.train.empty() || r.calibration.empty() || r.test.empty())
        throw SplitError("split produced an empty partition");
}

// Splits `rest` into calibration (n_cal, IID by rng) and train.
void draw_calibration(std::vector<int> rest, std::size_t n_cal, std::mt19937_64& rng,
                      SplitResult& out) {
    std::shuffle(rest.begin(), rest.end(), rng);
    out.calibration.assign(rest.begin(), rest.begin() + std::min(n_cal, rest.size()));
    out.train.assign(rest.begin() + out.calibration.size(), rest.end());
}

}  // namespace

SplitResult split(const std::vector<LabeledSample>& dataset, const SplitSpec& spec) {
    validate_spec(spec);
    const int n = static_cast<int>(dataset.size());
    if (n < 3) throw SplitError("dataset too small to split");
    const std::size_t n_test = static_cast<std::size_t>(std::llround(spec.test_frac * n));
    const std::size_t n_cal = static_cast<std::size_t>(std::llround(spec.cal_frac * n));
    auto rng = make_rng(derive_seed(spec.seed, {0x51}));

    SplitResult out;
    switch (spec.kind) {
        case SplitKind::iid: {
            std::vector<int> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            out.test.assign(idx.begin(), idx.begin() + n_test);
            out.calibration.assign(idx.begin() + n_test, idx.begin() + n_test + n_cal);
            out.train.assign(idx.begin() + n_test + n_cal, idx.end());
            break;
        }
        case SplitKind::ood_struct: {
            std::map<std::string, std::vector<int>> groups;
            for (int i = 0; i < n; ++i) groups[murcko_scaffold(dataset[i].graph)].push_back(i);
            if (groups.size() < 2)
                throw SplitError("too few scaffold groups for a structural split (" +
                                 std::to_string(groups.size()) + ")");
            std::vector<std::vector<int>> ordered;
            ordered.reserve(groups.size());
            for (auto& [key, members] : groups) ordered.push_back(std::move(members));
            std::shuffle(ordered.begin(), ordered.end(), rng);
            std::stable_sort(ordered.begin(), ordered.end(),
                             [](const auto& a, const auto& b) { return a.size() > b.size(); });
            std::vector<int> rest;
            std::size_t test_count = 0;
            for (const auto& grp : ordered) {
                if (test_count < n_test && test_count + grp.size() <= n_test) {
                    out.test.insert(out.test.end(), grp.begin(), grp.end());
                    test_count += grp.size();
                } else {
                    rest.insert(rest.end(), grp.begin(), grp.end());
                }
            }
            if (out.test.empty())
                throw SplitError("no scaffold group fits the test fraction; "
                                 "too few scaffold groups");
            draw_calibration(std::move(rest), n_cal, rng, out);
            break;
        }
        case SplitKind::ood_value: {
            std::vector<int> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(),
                      [&](int a, int b) { return dataset[a].y < dataset[b].y; });
            std::size_t k_lo = 0, k_hi = 0;
            switch (spec.tails) {
                case ValueTails::both:
                    k_lo = n_test / 2;
                    k_hi = n_test - k_lo;
                    break;
                case ValueTails::upper: k_hi = n_test; break;
                case ValueTails::lower: k_lo = n_test; break;
            }
            out.test.assign(idx.begin(), idx.begin() + k_lo);
            out.test.insert(out.test.end(), idx.end() - k_hi, idx.end());
            std::vector<int> rest(idx.begin() + k_lo, idx.end() - k_hi);
            draw_calibration(std::move(rest), n_cal, rng, out);
            break;
        }
    }
    check_nonempty(out);
    return out;
}

}  // namespace molcf
