#include "molcf/graph.hpp"

#include <algorithm>
#include <set>

namespace molcf {

namespace {
constexpr ElementInfo kElements[kNumElements] = {
    {"C", 4, 12.011},
    {"N", 3, 14.007},
    {"O", 2, 15.999},
    {"F", 1, 18.998},
};
}

const ElementInfo& element_info(Element e) { return kElements[static_cast<int>(e)]; }

int element_index(Element e) { return static_cast<int>(e); }

Element element_from_symbol(char c) {
    switch (c) {
        case 'C': return Element::C;
        case 'N': return Element::N;
        case 'O': return Element::O;
        case 'F': return Element::F;
        default: throw std::invalid_argument(std::string("unsupported element symbol '") + c + "'");
    }
}

BondOrder::BondOrder(int o) : order(o) {
    if (o < 1 || o > 3) throw std::invalid_argument("bond order must be 1, 2 or 3");
}

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
    for (auto& b : bonds_) {
        if (b.i > b.j) std::swap(b.i, b.j);
    }
    std::sort(bonds_.begin(), bonds_.end(), [](const Bond& a, const Bond& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    adjacency_.assign(atoms_.size(), {});
    for (const auto& b : bonds_) {
        if (b.i < 0 || b.j >= static_cast<int>(atoms_.size()))
            throw GraphError("bond endpoint out of range");
        adjacency_[b.i].emplace_back(b.j, b.order.order);
        adjacency_[b.j].emplace_back(b.i, b.order.order);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
    validate();
}

void MolecularGraph::validate() const {
    if (atoms_.empty()) throw GraphError("graph must have at least one atom");
    for (const auto& b : bonds_) {
        if (b.i == b.j) throw GraphError("self loop");
    }
    for (std::size_t k = 1; k < bonds_.size(); ++k) {
        if (bonds_[k - 1].i == bonds_[k].i && bonds_[k - 1].j == bonds_[k].j)
            throw GraphError("duplicate edge");
    }
    for (int i = 0; i < num_atoms(); ++i) {
        int sum = bond_order_sum(i);
        int maxv = element_info(atoms_[i].element).max_valence;
        if (sum > maxv)
            throw GraphError("valence violation at atom " + std::to_string(i) + ": " +
                             std::to_string(sum) + " > " + std::to_string(maxv) + " for " +
                             element_info(atoms_[i].element).symbol);
    }
    // connectivity
    std::vector<char> seen(atoms_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [w, o] : adjacency_[v]) {
            (void)o;
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    if (count != num_atoms()) throw GraphError("graph is not connected");
}

int MolecularGraph::bond_order_sum(int i) const {
    int s = 0;
    for (auto [j, o] : adjacency_[i]) {
        (void)j;
        s += o;
    }
    return s;
}

int MolecularGraph::degree(int i) const { return static_cast<int>(adjacency_[i].size()); }

int MolecularGraph::implicit_hydrogens(int i) const {
    return element_info(atoms_[i].element).max_valence - bond_order_sum(i);
}

bool MolecularGraph::has_edge(int i, int j) const {
    for (auto [k, o] : adjacency_[i]) {
        (void)o;
        if (k == j) return true;
    }
    return false;
}

int MolecularGraph::edge_order(int i, int j) const {
    for (auto [k, o] : adjacency_[i])
        if (k == j) return o;
    throw GraphError("no edge between " + std::to_string(i) + " and " + std::to_string(j));
}

std::vector<std::vector<double>> MolecularGraph::node_features() const {
    std::vector<std::vector<double>> feats(num_atoms());
    for (int i = 0; i < num_atoms(); ++i) {
        std::vector<double> row(kNumElements + 2, 0.0);
        row[element_index(atoms_[i].element)] = 1.0;
        row[kNumElements] = element_info(atoms_[i].element).atomic_weight;
        row[kNumElements + 1] = static_cast<double>(atoms_[i].formal_charge);
        feats[i] = std::move(row);
    }
    return feats;
}

std::vector<std::vector<double>> MolecularGraph::edge_features() const {
    std::vector<std::vector<double>> feats(num_bonds());
    for (int e = 0; e < num_bonds(); ++e) {
        std::vector<double> row(3, 0.0);
        row[bonds_[e].order.order - 1] = 1.0;
        feats[e] = std::move(row);
    }
    return feats;
}

MolecularGraph MolecularGraph::permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != num_atoms())
        throw GraphError("permutation size mismatch");
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
    std::vector<Atom> atoms(num_atoms());
    for (int i = 0; i < num_atoms(); ++i) atoms[i] = atoms_[perm[i]];
    std::vector<Bond> bonds;
    bonds.reserve(bonds_.size());
    for (const auto& b : bonds_) bonds.push_back({inv[b.i], inv[b.j], b.order});
    return MolecularGraph(std::move(atoms), std::move(bonds));
}

}  // namespace molcf
