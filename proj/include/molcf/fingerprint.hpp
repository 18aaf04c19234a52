#pragma once

#include <cstdint>
#include <vector>

#include "molcf/graph.hpp"

namespace molcf {

// Fixed-length bitset fingerprint of hashed circular atom environments.
struct Fingerprint {
    std::vector<std::uint64_t> words;
    int nbits = 1024;
    int radius = 2;

    bool test(int bit) const { return (words[bit >> 6] >> (bit & 63)) & 1ULL; }
    void set(int bit) { words[bit >> 6] |= 1ULL << (bit & 63); }
    int popcount() const;
    bool operator==(const Fingerprint& other) const {
        return nbits == other.nbits && words == other.words;
    }
};

constexpr int kDefaultFingerprintBits = 1024;
constexpr int kDefaultFingerprintRadius = 2;

// Morgan-style circular fingerprint. Atom environments hashed from (element, degree,
// bond order sum, implicit H, charge) and iteratively extended over neighbors up to
// `radius`. Deterministic and invariant under node relabeling.
Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius = kDefaultFingerprintRadius,
                               int nbits = kDefaultFingerprintBits);

// Jaccard distance 1 - |A&B|/|A|B|; two empty fingerprints have distance 0.
// Throws std::invalid_argument on bit-length mismatch.
double tanimoto_distance(const Fingerprint& a, const Fingerprint& b);

}  // namespace molcf
