#include "molcf/smiles.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>

namespace molcf {

namespace {

struct RingOpen {
    int atom;
    int order_spec;   // 0 = unspecified
    std::size_t pos;
};

int resolve_ring_order(int open_spec, int close_spec, std::size_t pos) {
    if (open_spec != 0 && close_spec != 0 && open_spec != close_spec)
        throw SmilesParseError("conflicting ring-closure bond orders", pos);
    if (open_spec != 0) return open_spec;
    if (close_spec != 0) return close_spec;
    return 1;
}

}  // namespace

MolecularGraph parse_smiles(const std::string& text) {
    std::vector<Atom> atoms;
    std::vector<Bond> bonds;
    std::vector<int> branch_stack;
    std::map<int, RingOpen> ring_open;
    int prev = -1;
    int pending = 0;   // 0 = no explicit bond symbol pending

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        switch (c) {
            case 'C':
            case 'N':
            case 'O':
            case 'F': {
                int idx = static_cast<int>(atoms.size());
                atoms.push_back({element_from_symbol(c), 0});
                if (prev >= 0) bonds.push_back({prev, idx, BondOrder(pending == 0 ? 1 : pending)});
                prev = idx;
                pending = 0;
                break;
            }
            case '-':
            case '=':
            case '#': {
                if (prev < 0) throw SmilesParseError("bond symbol before any atom", i);
                if (pending != 0) throw SmilesParseError("two consecutive bond symbols", i);
                pending = (c == '-') ? 1 : (c == '=') ? 2 : 3;
                break;
            }
            case '(': {
                if (prev < 0) throw SmilesParseError("branch before any atom", i);
                if (pending != 0) throw SmilesParseError("bond symbol before branch open", i);
                branch_stack.push_back(prev);
                break;
            }
            case ')': {
                if (branch_stack.empty()) throw SmilesParseError("unmatched ')'", i);
                if (pending != 0) throw SmilesParseError("dangling bond symbol before ')'", i);
                prev = branch_stack.back();
                branch_stack.pop_back();
                break;
            }
            default: {
                if (c >= '1' && c <= '9') {
                    if (prev < 0) throw SmilesParseError("ring digit before any atom", i);
                    int d = c - '0';
                    auto it = ring_open.find(d);
                    if (it == ring_open.end()) {
                        ring_open[d] = {prev, pending, i};
                    } else {
                        if (it->second.atom == prev)
                            throw SmilesParseError("ring closure to the same atom", i);
                        int order = resolve_ring_order(it->second.order_spec, pending, i);
                        bonds.push_back({it->second.atom, prev, BondOrder(order)});
                        ring_open.erase(it);
                    }
                    pending = 0;
                } else {
                    throw SmilesParseError(std::string("unexpected character '") + c + "'", i);
                }
            }
        }
    }
    if (pending != 0) throw SmilesParseError("dangling bond symbol at end of input", text.size());
    if (!branch_stack.empty()) throw SmilesParseError("unclosed branch", text.size());
    if (!ring_open.empty())
        throw SmilesParseError("unmatched ring closure digit " +
                                   std::to_string(ring_open.begin()->first),
                               ring_open.begin()->second.pos);
    if (atoms.empty()) throw SmilesParseError("empty input", 0);
    return MolecularGraph(std::move(atoms), std::move(bonds));
}

namespace {

// One round of neighborhood refinement; only ever splits classes.
std::vector<int> refine_ranks(const MolecularGraph& g, std::vector<int> ranks) {
    const int n = g.num_atoms();
    for (int iter = 0; iter <= n + 1; ++iter) {
        std::vector<std::vector<int>> sigs(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int>& s = sigs[v];
            s.push_back(ranks[v]);
            std::vector<std::pair<int, int>> nb;
            for (auto [w, o] : g.neighbors(v)) nb.emplace_back(o, ranks[w]);
            std::sort(nb.begin(), nb.end());
            for (auto [o, r] : nb) {
                s.push_back(o);
                s.push_back(r);
            }
        }
        std::vector<int> order(n);
        for (int v = 0; v < n; ++v) order[v] = v;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return sigs[a] < sigs[b]; });
        std::vector<int> next(n, 0);
        int rank = 0;
        for (int k = 0; k < n; ++k) {
            if (k > 0 && sigs[order[k]] != sigs[order[k - 1]]) ++rank;
            next[order[k]] = rank;
        }
        if (next == ranks) break;
        ranks = std::move(next);
    }
    return ranks;
}

std::vector<int> initial_ranks(const MolecularGraph& g) {
    const int n = g.num_atoms();
    std::vector<std::array<int, 5>> keys(n);
    for (int v = 0; v < n; ++v) {
        keys[v] = {element_index(g.atoms()[v].element), g.degree(v), g.bond_order_sum(v),
                   g.implicit_hydrogens(v), g.atoms()[v].formal_charge};
    }
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> ranks(n, 0);
    int rank = 0;
    for (int k = 0; k < n; ++k) {
        if (k > 0 && keys[order[k]] != keys[order[k - 1]]) ++rank;
        ranks[order[k]] = rank;
    }
    return ranks;
}

bool is_discrete(const std::vector<int>& ranks) {
    std::vector<char> seen(ranks.size(), 0);
    for (int r : ranks) {
        if (seen[r]) return false;
        seen[r] = 1;
    }
    return true;
}

const char* bond_symbol(int order) { return order == 2 ? "=" : order == 3 ? "#" : ""; }

// Emits SMILES from a graph with discrete canonical ranks. Root is the rank-0 atom,
// children visited in ascending rank order, ring digits allocated lowest-free-first.
std::string emit_smiles(const MolecularGraph& g, const std::vector<int>& ranks) {
    const int n = g.num_atoms();
    int root = 0;
    for (int v = 0; v < n; ++v)
        if (ranks[v] == 0) root = v;

    // DFS pre-pass: tree children and ring (back) edges.
    std::vector<std::vector<int>> children(n);
    std::vector<int> parent(n, -1);
    std::vector<char> visited(n, 0);
    struct RingBond {
        int open_atom;
        int close_atom;
        int order;
        int digit = -1;
    };
    std::vector<RingBond> rings;
    std::vector<int> preorder;

    std::function<void(int)> dfs = [&](int v) {
        visited[v] = 1;
        preorder.push_back(v);
        std::vector<std::pair<int, int>> nbs(g.neighbors(v).begin(), g.neighbors(v).end());
        std::sort(nbs.begin(), nbs.end(),
                  [&](auto a, auto b) { return ranks[a.first] < ranks[b.first]; });
        for (auto [w, o] : nbs) {
            if (!visited[w]) {
                parent[w] = v;
                children[v].push_back(w);
                dfs(w);
            } else if (w != parent[v]) {
                bool known = false;
                for (const auto& r : rings)
                    if ((r.open_atom == w && r.close_atom == v) ||
                        (r.open_atom == v && r.close_atom == w))
                        known = true;
                if (!known) rings.push_back({w, v, o, -1});
            }
        }
    };
    dfs(root);

    // Digit allocation simulated in emission order: closings free, openings take lowest.
    std::vector<int> pre_pos(n);
    for (int k = 0; k < n; ++k) pre_pos[preorder[k]] = k;
    std::vector<char> digit_busy(10, 0);
    for (int v : preorder) {
        std::vector<RingBond*> closing, opening;
        for (auto& r : rings) {
            if (r.close_atom == v) closing.push_back(&r);
            if (r.open_atom == v) opening.push_back(&r);
        }
        std::sort(closing.begin(), closing.end(),
                  [](const RingBond* a, const RingBond* b) { return a->digit < b->digit; });
        for (auto* r : closing) digit_busy[r->digit] = 0;
        std::sort(opening.begin(), opening.end(), [&](const RingBond* a, const RingBond* b) {
            return pre_pos[a->close_atom] < pre_pos[b->close_atom];
        });
        for (auto* r : opening) {
            int d = 1;
            while (d <= 9 && digit_busy[d]) ++d;
            if (d > 9) throw GraphError("more than 9 simultaneous ring closures");
            r->digit = d;
            digit_busy[d] = 1;
        }
    }

    std::string out;
    std::function<void(int)> write = [&](int v) {
        out += element_info(g.atoms()[v].element).symbol;
        std::vector<const RingBond*> closing, opening;
        for (const auto& r : rings) {
            if (r.close_atom == v) closing.push_back(&r);
            if (r.open_atom == v) opening.push_back(&r);
        }
        std::sort(closing.begin(), closing.end(),
                  [](const RingBond* a, const RingBond* b) { return a->digit < b->digit; });
        for (const auto* r : closing) out += static_cast<char>('0' + r->digit);
        std::sort(opening.begin(), opening.end(), [&](const RingBond* a, const RingBond* b) {
            return pre_pos[a->close_atom] < pre_pos[b->close_atom];
        });
        for (const auto* r : opening) {
            out += bond_symbol(r->order);
            out += static_cast<char>('0' + r->digit);
        }
        const auto& kids = children[v];
        for (std::size_t k = 0; k < kids.size(); ++k) {
            int c = kids[k];
            const char* sym = bond_symbol(g.edge_order(v, c));
            if (k + 1 < kids.size()) {
                out += '(';
                out += sym;
                write(c);
                out += ')';
            } else {
                out += sym;
                write(c);
            }
        }
    };
    write(root);
    return out;
}

struct CanonResult {
    std::string smiles;
    std::vector<int> ranks;
};

// Refinement plus individualization search; returns the lexicographically smallest
// emission over all tie-break branches.
CanonResult canon_search(const MolecularGraph& g, std::vector<int> ranks) {
    ranks = refine_ranks(g, std::move(ranks));
    if (is_discrete(ranks)) return {emit_smiles(g, ranks), ranks};

    int target = -1;
    const int n = g.num_atoms();
    std::vector<int> class_size(n, 0);
    for (int r : ranks) ++class_size[r];
    for (int r = 0; r < n; ++r) {
        if (class_size[r] > 1) {
            target = r;
            break;
        }
    }
    std::optional<CanonResult> best;
    for (int v = 0; v < n; ++v) {
        if (ranks[v] != target) continue;
        std::vector<int> branched(ranks);
        for (int u = 0; u < n; ++u)
            if (u != v && branched[u] >= target) ++branched[u];
        CanonResult r = canon_search(g, std::move(branched));
        if (!best || r.smiles < best->smiles) best = std::move(r);
    }
    return *best;
}

}  // namespace

std::vector<int> canonical_ranks(const MolecularGraph& g) {
    return canon_search(g, initial_ranks(g)).ranks;
}

MolecularGraph canonical_form(const MolecularGraph& g) {
    std::vector<int> ranks = canonical_ranks(g);
    std::vector<int> perm(ranks.size());
    for (std::size_t v = 0; v < ranks.size(); ++v) perm[ranks[v]] = static_cast<int>(v);
    return g.permuted(perm);
}

std::string write_smiles(const MolecularGraph& g) {
    return canon_search(g, initial_ranks(g)).smiles;
}

}  // namespace molcf
