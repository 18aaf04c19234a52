#include "molcf/scaffold.hpp"

#include <vector>

#include "molcf/smiles.hpp"

namespace molcf {

std::string murcko_scaffold(const MolecularGraph& g) {
    if (!g.has_ring()) return kAcyclicScaffold;

    std::vector<char> keep(g.num_atoms(), 1);
    std::vector<int> deg(g.num_atoms());
    for (int v = 0; v < g.num_atoms(); ++v) deg[v] = g.degree(v);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < g.num_atoms(); ++v) {
            if (keep[v] && deg[v] == 1) {
                keep[v] = 0;
                changed = true;
                for (auto [w, o] : g.neighbors(v)) {
                    (void)o;
                    if (keep[w]) --deg[w];
                }
            }
        }
    }

    std::vector<int> remap(g.num_atoms(), -1);
    std::vector<Atom> atoms;
    for (int v = 0; v < g.num_atoms(); ++v) {
        if (keep[v]) {
            remap[v] = static_cast<int>(atoms.size());
            atoms.push_back(g.atoms()[v]);
        }
    }
    std::vector<Bond> bonds;
    for (const auto& b : g.bonds()) {
        if (keep[b.i] && keep[b.j]) bonds.push_back({remap[b.i], remap[b.j], b.order});
    }
    return write_smiles(MolecularGraph(std::move(atoms), std::move(bonds)));
}

}  // namespace molcf
