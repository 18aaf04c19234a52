#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molcf/oracle.hpp"

namespace molcf {

enum class SplitKind : std::uint8_t { iid, ood_struct, ood_value };
enum class ValueTails : std::uint8_t { both, upper, lower };

SplitKind split_kind_from_string(const std::string& s);
std::string to_string(SplitKind k);

struct SplitSpec {
    SplitKind kind = SplitKind::iid;
    double train_frac = 0.8;
    double cal_frac = 0.1;
    double test_frac = 0.1;
    std::uint64_t seed = 0;
    ValueTails tails = ValueTails::both;   // ood_value only
};

struct SplitResult {
    std::vector<int> train;
    std::vector<int> calibration;
    std::vector<int> test;
};

class SplitError : public std::runtime_error {
public:
    explicit SplitError(const std::string& what) : std::runtime_error(what) {}
};

// Disjoint, exhaustive, seed-deterministic partition.
//   iid:        uniform shuffle.
//   ood_struct: whole murcko-scaffold groups assigned to test, largest groups first
//               (seed-shuffled among equal sizes), each added only if it still fits
//               the test budget; zero scaffold leakage by construction.
//   ood_value:  test = most extreme targets (both tails by default, half the budget
//               each); calibration drawn IID from the remainder.
SplitResult split(const std::vector<LabeledSample>& dataset, const SplitSpec& spec);

}  // namespace molcf
