#pragma once

#include <string>
#include <vector>

#include "molcf/graph.hpp"

namespace molcf {

class SmilesParseError : public std::runtime_error {
public:
    SmilesParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position;
};

// Parses the restricted kekulized SMILES subset: atoms C/N/O/F, branches, bond
// symbols -/=/#, ring closure digits 1-9. No aromatic lowercase, charges or isotopes.
// Grammar is documented in docs/smiles.md.
MolecularGraph parse_smiles(const std::string& text);

// Canonical node ranks: iterative neighborhood refinement with tie-breaking by
// individualization, minimizing the emitted string. Isomorphic graphs get matching
// rank structures.
std::vector<int> canonical_ranks(const MolecularGraph& g);

// Graph relabeled into canonical node order. Isomorphic inputs yield structurally
// identical outputs (same atom array, same bond array).
MolecularGraph canonical_form(const MolecularGraph& g);

// Deterministic canonical SMILES. parse_smiles(write_smiles(g)) is isomorphic to g
// and isomorphic graphs produce identical strings.
std::string write_smiles(const MolecularGraph& g);

}  // namespace molcf
