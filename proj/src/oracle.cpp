#include "molcf/oracle.hpp"

#include <cstdio>
#include <sstream>

#include "molcf/smiles.hpp"

namespace molcf {

namespace {

constexpr const char* kTableVersion = "crippen-v1";

const std::vector<std::pair<const char*, double>> kDefaultEntries = {
    {"C.sp3.hc", 0.1441},    // saturated carbon, carbon neighbors only
    {"C.sp3.het", -0.2035},  // saturated carbon with N/O/F neighbor
    {"C.unsat.hc", 0.1551},  // carbon with a multiple bond, carbon neighbors only
    {"C.unsat.het", -0.2783},
    {"N.sat", -1.0190},
    {"N.unsat", -0.3396},
    {"O.sat", -0.2893},
    {"O.unsat", -0.1526},
    {"F", 0.4202},
    {"H", 0.1230},
};

}  // namespace

ContributionTable ContributionTable::defaults() {
    ContributionTable t;
    t.version_ = kTableVersion;
    for (const auto& [k, v] : kDefaultEntries) t.entries_[k] = v;
    return t;
}

ContributionTable ContributionTable::from_text(const std::string& text) {
    ContributionTable t;
    std::istringstream in(text);
    std::string line;
    bool have_version = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string word;
            ls >> word;
            t.version_ = word;
            have_version = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cls;
        double value;
        if (!(ls >> cls >> value)) throw DatasetError("malformed contribution table line: " + line);
        t.entries_[cls] = value;
    }
    if (!have_version || t.entries_.empty())
        throw DatasetError("contribution table missing version header or entries");
    return t;
}

std::string ContributionTable::to_text() const {
    std::ostringstream out;
    out << "# " << version_ << "\n";
    char buf[64];
    for (const auto& [k, v] : entries_) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        out << k << " " << buf << "\n";
    }
    return out.str();
}

double ContributionTable::contribution(const std::string& atom_class) const {
    auto it = entries_.find(atom_class);
    if (it == entries_.end()) throw DatasetError("unknown atom class: " + atom_class);
    return it->second;
}

std::string atom_class(const MolecularGraph& g, int atom) {
    Element e = g.atoms()[atom].element;
    bool unsat = false;
    bool hetero = false;
    for (auto [w, o] : g.neighbors(atom)) {
        if (o > 1) unsat = true;
        if (g.atoms()[w].element != Element::C) hetero = true;
    }
    switch (e) {
        case Element::C:
            if (unsat) return hetero ? "C.unsat.het" : "C.unsat.hc";
            return hetero ? "C.sp3.het" : "C.sp3.hc";
        case Element::N: return unsat ? "N.unsat" : "N.sat";
        case Element::O: return unsat ? "O.unsat" : "O.sat";
        case Element::F: return "F";
    }
    throw DatasetError("unreachable element");
}

double atom_contribution(const MolecularGraph& g, int atom, const ContributionTable& table) {
    return table.contribution(atom_class(g, atom)) +
           g.implicit_hydrogens(atom) * table.hydrogen_contribution();
}

double crippen_logp(const MolecularGraph& g, const ContributionTable& table) {
    double total = 0.0;
    for (int v = 0; v < g.num_atoms(); ++v) total += atom_contribution(g, v, table);
    return total;
}

double crippen_logp(const MolecularGraph& g) {
    static const ContributionTable table = ContributionTable::defaults();
    return crippen_logp(g, table);
}

MolecularGraph random_molecule(const MolecularGraph& seed_graph, int steps, std::mt19937_64& rng,
                               const EditConfig& cfg) {
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    MolecularGraph g = seed_graph;
    for (int s = 0; s < steps; ++s) {
        std::vector<EditOp> ops = valid_edits(g, cfg);
        if (ops.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, ops.size() - 1);
        g = apply_edit(g, ops[pick(rng)]);
    }
    return g;
}

std::vector<LabeledSample> generate_dataset(int n, int max_steps, std::mt19937_64& rng,
                                            const std::vector<std::string>& seed_smiles,
                                            const ContributionTable& table) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    std::vector<std::string> seeds = seed_smiles;
    if (seeds.empty()) seeds = {"C", "C1=CC=CC=C1", "CC(=O)O"};
    std::vector<MolecularGraph> seed_graphs;
    seed_graphs.reserve(seeds.size());
    for (const auto& s : seeds) seed_graphs.push_back(parse_smiles(s));

    std::vector<LabeledSample> out;
    std::map<std::string, char> seen;
    const long attempts_cap = 200L * n + 1000;
    std::uniform_int_distribution<std::size_t> pick_seed(0, seed_graphs.size() - 1);
    std::uniform_int_distribution<int> pick_steps(0, max_steps);

    for (long attempt = 0; static_cast<int>(out.size()) < n; ++attempt) {
        if (attempt >= attempts_cap)
            throw DatasetError("insufficient diversity: produced " + std::to_string(out.size()) +
                               " of " + std::to_string(n) + " unique molecules in " +
                               std::to_string(attempts_cap) + " attempts");
        MolecularGraph g = random_molecule(seed_graphs[pick_seed(rng)], pick_steps(rng), rng);
        std::string key = write_smiles(g);
        if (seen.count(key)) continue;
        seen[key] = 1;
        double y = crippen_logp(g, table);
        out.push_back({std::move(g), y, std::move(key)});
    }
    return out;
}

}  // namespace molcf
