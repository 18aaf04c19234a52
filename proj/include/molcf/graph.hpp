#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace molcf {

// Supported element alphabet. Indices are stable and used in feature one-hots.
enum class Element : std::uint8_t { C = 0, N = 1, O = 2, F = 3 };

constexpr int kNumElements = 4;

struct ElementInfo {
    const char* symbol;
    int max_valence;
    double atomic_weight;
};

const ElementInfo& element_info(Element e);
Element element_from_symbol(char c);   // throws std::invalid_argument on unknown symbol
int element_index(Element e);

// Kekulized bond order, 1..3.
struct BondOrder {
    int order = 1;
    explicit BondOrder(int o = 1);
    bool operator==(const BondOrder& other) const { return order == other.order; }
};

struct Atom {
    Element element;
    int formal_charge = 0;   // kept for feature-shape parity; always 0 in this grammar
};

struct Bond {
    int i;   // i < j
    int j;
    BondOrder order;
};

class GraphError : public std::runtime_error {
public:
    explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

// Immutable connected molecular graph with implicit hydrogens.
// Node features: [one-hot element (4) | atomic weight | formal charge], edge features:
// one-hot bond order (3). Validation happens at construction: connectivity, no self
// loops or duplicate edges, and per-node valence (sum of incident orders <= max valence).
class MolecularGraph {
public:
    MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

    int num_atoms() const { return static_cast<int>(atoms_.size()); }
    int num_bonds() const { return static_cast<int>(bonds_.size()); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Bond>& bonds() const { return bonds_; }

    // Sum of incident bond orders at node i.
    int bond_order_sum(int i) const;
    int degree(int i) const;
    // Implicit hydrogen count: max_valence - bond_order_sum.
    int implicit_hydrogens(int i) const;
    // Remaining valence capacity at node i.
    int free_valence(int i) const { return implicit_hydrogens(i); }

    // Neighbors of i as (neighbor index, bond order) in ascending neighbor order.
    const std::vector<std::pair<int, int>>& neighbors(int i) const { return adjacency_[i]; }

    bool has_edge(int i, int j) const;
    int edge_order(int i, int j) const;   // throws if no such edge

    // True when the graph contains at least one cycle.
    bool has_ring() const { return num_bonds() >= num_atoms(); }

    // Feature tensors per the fixed layout above, row-major.
    std::vector<std::vector<double>> node_features() const;
    std::vector<std::vector<double>> edge_features() const;

    // Node permutation: node i of the result is node perm[i] of *this.
    MolecularGraph permuted(const std::vector<int>& perm) const;

private:
    std::vector<Atom> atoms_;
    std::vector<Bond> bonds_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;

    void validate() const;
};

}  // namespace molcf
