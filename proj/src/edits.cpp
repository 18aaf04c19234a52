#include "molcf/edits.hpp"

#include <algorithm>
#include <map>

#include "molcf/smiles.hpp"

namespace molcf {

namespace {

// True when the edge (i, j) can be removed without disconnecting the graph,
// i.e. it lies on a cycle.
bool edge_on_cycle(const MolecularGraph& g, int i, int j) {
    std::vector<char> seen(g.num_atoms(), 0);
    std::vector<int> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == j) return true;
        for (auto [w, o] : g.neighbors(v)) {
            (void)o;
            if ((v == i && w == j) || (v == j && w == i)) continue;
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

}  // namespace

std::vector<EditOp> valid_edits(const MolecularGraph& g, const EditConfig& cfg) {
    std::vector<EditOp> ops;
    const int n = g.num_atoms();

    if (cfg.allow_add_atom) {
        for (int v = 0; v < n; ++v) {
            int cap = g.free_valence(v);
            for (Element e : cfg.alphabet) {
                for (int o : cfg.orders) {
                    if (o <= cap && o <= element_info(e).max_valence)
                        ops.push_back({EditKind::add_atom_with_bond, v, -1, e, o});
                }
            }
        }
    }
    if (cfg.allow_delete_leaf && n >= 2) {
        for (int v = 0; v < n; ++v)
            if (g.degree(v) == 1) ops.push_back({EditKind::delete_leaf_atom, v, -1});
    }
    if (cfg.allow_add_bond) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (g.has_edge(i, j)) continue;
                int cap = std::min(g.free_valence(i), g.free_valence(j));
                for (int o : cfg.orders)
                    if (o <= cap) ops.push_back({EditKind::add_bond, i, j, Element::C, o});
            }
        }
    }
    if (cfg.allow_delete_bond) {
        for (const auto& b : g.bonds())
            if (edge_on_cycle(g, b.i, b.j))
                ops.push_back({EditKind::delete_bond, b.i, b.j});
    }
    if (cfg.allow_change_order) {
        for (const auto& b : g.bonds()) {
            int cur = b.order.order;
            int cap = std::min(g.free_valence(b.i), g.free_valence(b.j));
            for (int o : cfg.orders) {
                if (o == cur) continue;
                if (o - cur <= cap)
                    ops.push_back({EditKind::change_bond_order, b.i, b.j, Element::C, o});
            }
        }
    }
    if (cfg.allow_substitute) {
        for (int v = 0; v < n; ++v) {
            int need = g.bond_order_sum(v);
            for (Element e : cfg.alphabet) {
                if (e == g.atoms()[v].element) continue;
                if (element_info(e).max_valence >= need)
                    ops.push_back({EditKind::substitute_atom, v, -1, e});
            }
        }
    }
    return ops;
}

MolecularGraph apply_edit(const MolecularGraph& g, const EditOp& op) {
    std::vector<Atom> atoms = g.atoms();
    std::vector<Bond> bonds = g.bonds();
    switch (op.kind) {
        case EditKind::add_atom_with_bond: {
            int idx = static_cast<int>(atoms.size());
            atoms.push_back({op.element, 0});
            bonds.push_back({op.node_a, idx, BondOrder(op.order)});
            break;
        }
        case EditKind::delete_leaf_atom: {
            int v = op.node_a;
            if (g.degree(v) != 1) throw GraphError("delete_leaf_atom on non-leaf");
            atoms.erase(atoms.begin() + v);
            std::vector<Bond> kept;
            for (const auto& b : bonds) {
                if (b.i == v || b.j == v) continue;
                kept.push_back({b.i > v ? b.i - 1 : b.i, b.j > v ? b.j - 1 : b.j, b.order});
            }
            bonds = std::move(kept);
            break;
        }
        case EditKind::add_bond:
            bonds.push_back({op.node_a, op.node_b, BondOrder(op.order)});
            break;
        case EditKind::delete_bond: {
            auto it = std::find_if(bonds.begin(), bonds.end(), [&](const Bond& b) {
                return b.i == std::min(op.node_a, op.node_b) && b.j == std::max(op.node_a, op.node_b);
            });
            if (it == bonds.end()) throw GraphError("delete_bond on missing edge");
            bonds.erase(it);
            break;
        }
        case EditKind::change_bond_order: {
            bool found = false;
            for (auto& b : bonds) {
                if (b.i == std::min(op.node_a, op.node_b) && b.j == std::max(op.node_a, op.node_b)) {
                    b.order = BondOrder(op.order);
                    found = true;
                }
            }
            if (!found) throw GraphError("change_bond_order on missing edge");
            break;
        }
        case EditKind::substitute_atom:
            atoms[op.node_a].element = op.element;
            break;
    }
    return MolecularGraph(std::move(atoms), std::move(bonds));
}

std::vector<MolecularGraph> enumerate_1_edit(const MolecularGraph& g, const EditConfig& cfg) {
    const std::string self = write_smiles(g);
    std::map<std::string, MolecularGraph> unique;
    for (const EditOp& op : valid_edits(g, cfg)) {
        MolecularGraph h = apply_edit(g, op);
        std::string key = write_smiles(h);
        if (key == self) continue;
        unique.emplace(std::move(key), std::move(h));
    }
    std::vector<MolecularGraph> out;
    out.reserve(unique.size());
    for (auto& [key, h] : unique) out.push_back(std::move(h));
    return out;
}

std::vector<MolecularGraph> enumerate_k_edit(const MolecularGraph& g, int k, const EditConfig& cfg,
                                             std::size_t candidate_cap) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::map<std::string, MolecularGraph> result;
    std::vector<MolecularGraph> frontier{g};
    std::map<std::string, char> visited;
    visited[write_smiles(g)] = 1;

    for (int depth = 0; depth < k; ++depth) {
        std::vector<MolecularGraph> next;
        for (const auto& u : frontier) {
            for (auto& h : enumerate_1_edit(u, cfg)) {
                std::string key = write_smiles(h);
                if (visited.count(key)) continue;
                visited[key] = 1;
                result.emplace(key, h);
                if (result.size() > candidate_cap)
                    throw GraphError("k-edit neighborhood exceeds candidate cap of " +
                                     std::to_string(candidate_cap));
                next.push_back(std::move(h));
            }
        }
        frontier = std::move(next);
    }
    std::vector<MolecularGraph> out;
    out.reserve(result.size());
    for (auto& [key, h] : result) out.push_back(std::move(h));
    return out;
}

}  // namespace molcf
