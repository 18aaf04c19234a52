#pragma once

// Independent reference implementations used only by tests. Each one recomputes a
// result by exhaustive construction rather than reusing the library's code path.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "molcf/graph.hpp"
#include "molcf/metrics.hpp"
#include "molcf/smiles.hpp"

namespace testoracle {

// Every graph one edit away from g: tries every (kind, operand, element, order)
// tuple, constructs the raw atom/bond lists directly and keeps whatever the graph
// invariants accept. Returns canonical SMILES, deduplicated, excluding g.
inline std::set<std::string> brute_force_1_edit(const molcf::MolecularGraph& g) {
    using namespace molcf;
    const std::vector<Element> alphabet{Element::C, Element::N, Element::O, Element::F};
    const std::string self = write_smiles(g);
    std::set<std::string> out;

    auto try_graph = [&](std::vector<Atom> atoms, std::vector<Bond> bonds) {
        try {
            MolecularGraph h(std::move(atoms), std::move(bonds));
            std::string key = write_smiles(h);
            if (key != self) out.insert(key);
        } catch (const std::exception&) {
        }
    };

    const int n = g.num_atoms();
    // add_atom_with_bond
    for (int v = 0; v < n; ++v)
        for (Element e : alphabet)
            for (int o = 1; o <= 3; ++o) {
                auto atoms = g.atoms();
                auto bonds = g.bonds();
                atoms.push_back({e, 0});
                try {
                    bonds.push_back({v, n, BondOrder(o)});
                } catch (const std::exception&) {
                    continue;
                }
                try_graph(std::move(atoms), std::move(bonds));
            }
    // delete_leaf_atom
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) != 1) continue;
        std::vector<Atom> atoms;
        for (int i = 0; i < n; ++i)
            if (i != v) atoms.push_back(g.atoms()[i]);
        std::vector<Bond> bonds;
        for (const auto& b : g.bonds()) {
            if (b.i == v || b.j == v) continue;
            bonds.push_back({b.i > v ? b.i - 1 : b.i, b.j > v ? b.j - 1 : b.j, b.order});
        }
        if (!atoms.empty()) try_graph(std::move(atoms), std::move(bonds));
    }
    // add_bond
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (g.has_edge(i, j)) continue;
            for (int o = 1; o <= 3; ++o) {
                auto atoms = g.atoms();
                auto bonds = g.bonds();
                bonds.push_back({i, j, BondOrder(o)});
                try_graph(std::move(atoms), std::move(bonds));
            }
        }
    // delete_bond
    for (std::size_t e = 0; e < g.bonds().size(); ++e) {
        auto atoms = g.atoms();
        auto bonds = g.bonds();
        bonds.erase(bonds.begin() + e);
        try_graph(std::move(atoms), std::move(bonds));
    }
    // change_bond_order
    for (std::size_t e = 0; e < g.bonds().size(); ++e)
        for (int o = 1; o <= 3; ++o) {
            if (o == g.bonds()[e].order.order) continue;
            auto atoms = g.atoms();
            auto bonds = g.bonds();
            bonds[e].order = BondOrder(o);
            try_graph(std::move(atoms), std::move(bonds));
        }
    // substitute_atom
    for (int v = 0; v < n; ++v)
        for (Element e : alphabet) {
            if (e == g.atoms()[v].element) continue;
            auto atoms = g.atoms();
            auto bonds = g.bonds();
            atoms[v].element = e;
            try_graph(std::move(atoms), std::move(bonds));
        }
    return out;
}

// UER-AUC by explicit per-threshold refiltering and segment-by-segment integration.
inline double brute_force_uer_auc(const std::vector<molcf::EvalRecord>& records,
                                  molcf::Accumulator g) {
    double smax = 0.0;
    for (const auto& r : records) smax = std::max(smax, r.sigma2);
    std::vector<double> grid{0.0, 1.0};
    for (const auto& r : records) grid.push_back(smax > 0 ? r.sigma2 / smax : 1.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto gamma_at = [&](double xi) {
        std::vector<double> errs;
        for (const auto& r : records) {
            double nu = smax > 0 ? r.sigma2 / smax : 1.0;
            if (nu <= xi) errs.push_back(r.abs_error());
        }
        if (errs.empty()) return 0.0;
        if (g == molcf::Accumulator::max) return *std::max_element(errs.begin(), errs.end());
        if (g == molcf::Accumulator::mean) {
            double s = 0.0;
            for (double e : errs) s += e;
            return s / errs.size();
        }
        std::sort(errs.begin(), errs.end());
        std::size_t m = errs.size() / 2;
        return errs.size() % 2 == 1 ? errs[m] : 0.5 * (errs[m - 1] + errs[m]);
    };

    double full = gamma_at(1.0);
    double gmax = 0.0;
    for (double xi : grid) gmax = std::max(gmax, gamma_at(xi));
    double auc = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double raw = gmax > 0 ? (full - gamma_at(grid[k])) / gmax : 0.0;
        double clamped = std::min(1.0, std::max(0.0, raw));
        auc += clamped * (grid[k + 1] - grid[k]);
    }
    return auc;
}

// Monotone least squares by exhaustive search over contiguous-block partitions
// (feasible only for small n). Points must already be tie-averaged and sorted by x.
inline std::optional<std::vector<double>> exhaustive_monotone_lsq(
    const std::vector<double>& ys, const std::vector<double>& ws) {
    const std::size_t n = ys.size();
    if (n == 0 || n > 16) return std::nullopt;
    double best_sse = 0.0;
    std::optional<std::vector<double>> best;
    const unsigned max_mask = 1u << (n - 1);   // bit k set: boundary after point k
    for (unsigned mask = 0; mask < max_mask; ++mask) {
        std::vector<double> fit(n);
        double sse = 0.0;
        bool feasible = true;
        double prev = -1e300;
        std::size_t start = 0;
        for (std::size_t k = 0; k < n; ++k) {
            bool boundary = k + 1 == n || (mask & (1u << k));
            if (!boundary) continue;
            double wsum = 0.0, wy = 0.0;
            for (std::size_t j = start; j <= k; ++j) {
                wsum += ws[j];
                wy += ws[j] * ys[j];
            }
            double mean = wy / wsum;
            if (mean < prev) {
                feasible = false;
                break;
            }
            prev = mean;
            for (std::size_t j = start; j <= k; ++j) {
                fit[j] = mean;
                sse += ws[j] * (ys[j] - mean) * (ys[j] - mean);
            }
            start = k + 1;
        }
        if (!feasible) continue;
        if (!best || sse < best_sse) {
            best = fit;
            best_sse = sse;
        }
    }
    return best;
}

}  // namespace testoracle
