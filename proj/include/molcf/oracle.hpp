#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "molcf/edits.hpp"
#include "molcf/graph.hpp"

namespace molcf {

// Additive logP contribution table over a reduced atom-class system. Classes are a
// deterministic function of (element, incident bond orders, neighbor elements);
// every valid graph is typable. Constants follow the Wildman-Crippen values where
// the reduced classes align; the table is versioned so labels can be pinned.
class ContributionTable {
public:
    static ContributionTable defaults();
    static ContributionTable from_text(const std::string& text);

    std::string to_text() const;
    double contribution(const std::string& atom_class) const;   // throws on unknown class
    double hydrogen_contribution() const { return contribution("H"); }
    const std::map<std::string, double>& entries() const { return entries_; }
    const std::string& version() const { return version_; }

private:
    std::string version_;
    std::map<std::string, double> entries_;
};

// Deterministic atom class key used by the table.
std::string atom_class(const MolecularGraph& g, int atom);

// Contribution of one atom including its implicit hydrogens.
double atom_contribution(const MolecularGraph& g, int atom, const ContributionTable& table);

// Ground-truth oracle: sum of per-atom class contributions plus implicit-hydrogen
// contributions. Deterministic and invariant under node relabeling.
double crippen_logp(const MolecularGraph& g, const ContributionTable& table);
double crippen_logp(const MolecularGraph& g);   // defaults() table

struct LabeledSample {
    MolecularGraph graph;
    double y;
    std::string smiles;   // canonical
};

// Applies `steps` uniformly random valid single edits; stops early when no valid
// edit exists. Deterministic for a given rng state.
MolecularGraph random_molecule(const MolecularGraph& seed_graph, int steps, std::mt19937_64& rng,
                               const EditConfig& cfg = {});

class DatasetError : public std::runtime_error {
public:
    explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

// n unique-by-canonical-SMILES samples labeled by crippen_logp, grown by random
// edit walks from the seed molecules. Throws DatasetError when uniqueness cannot
// be reached within a bounded number of attempts.
std::vector<LabeledSample> generate_dataset(int n, int max_steps, std::mt19937_64& rng,
                                            const std::vector<std::string>& seed_smiles = {},
                                            const ContributionTable& table = ContributionTable::defaults());

}  // namespace molcf
