#pragma once

#include <string>

#include "molcf/graph.hpp"

namespace molcf {

// Sentinel scaffold key shared by all acyclic molecules.
inline constexpr const char* kAcyclicScaffold = "ACYCLIC";

// Murcko-style scaffold: iteratively strips degree-1 atoms until only ring systems
// and their linkers remain; returns the canonical SMILES of the remainder.
// Acyclic molecules map to kAcyclicScaffold.
std::string murcko_scaffold(const MolecularGraph& g);

}  // namespace molcf
