#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "molcf/graph.hpp"

namespace molcf {

enum class EditKind : std::uint8_t {
    add_atom_with_bond,
    delete_leaf_atom,
    add_bond,
    delete_bond,
    change_bond_order,
    substitute_atom,
};

// A single valence-preserving graph modification. Operands that do not apply to a
// kind are ignored (e.g. `order` for delete_leaf_atom).
struct EditOp {
    EditKind kind;
    int node_a = -1;
    int node_b = -1;
    Element element = Element::C;
    int order = 1;
};

struct EditConfig {
    bool allow_add_atom = true;
    bool allow_delete_leaf = true;
    bool allow_add_bond = true;
    bool allow_delete_bond = true;
    bool allow_change_order = true;
    bool allow_substitute = true;
    std::vector<Element> alphabet = {Element::C, Element::N, Element::O, Element::F};
    std::vector<int> orders = {1, 2, 3};
};

// All edit operations applicable to g that yield a valid connected graph.
// Deterministic order; distinct ops may yield isomorphic results.
std::vector<EditOp> valid_edits(const MolecularGraph& g, const EditConfig& cfg = {});

// Applies an op assumed to come from valid_edits; throws GraphError otherwise.
MolecularGraph apply_edit(const MolecularGraph& g, const EditOp& op);

// The complete valence-constrained 1-edit neighborhood: all distinct graphs one edit
// away from g, deduplicated by canonical SMILES, excluding g itself, returned in
// canonical-SMILES order.
std::vector<MolecularGraph> enumerate_1_edit(const MolecularGraph& g, const EditConfig& cfg = {});

// Breadth-first composition of enumerate_1_edit up to depth k (all graphs reachable
// in at most k edits, g excluded). Throws GraphError when the candidate count
// exceeds `candidate_cap`.
std::vector<MolecularGraph> enumerate_k_edit(const MolecularGraph& g, int k,
                                             const EditConfig& cfg = {},
                                             std::size_t candidate_cap = 100000);

}  // namespace molcf
