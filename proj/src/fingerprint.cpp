#include "molcf/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "molcf/rng.hpp"

namespace molcf {

namespace {

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

}  // namespace

int Fingerprint::popcount() const {
    int c = 0;
    for (std::uint64_t w : words) c += std::popcount(w);
    return c;
}

Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius, int nbits) {
    if (radius < 0) throw std::invalid_argument("radius must be >= 0");
    if (nbits < 64) throw std::invalid_argument("nbits must be >= 64");

    const int n = g.num_atoms();
    std::vector<std::uint64_t> ids(n);
    for (int v = 0; v < n; ++v) {
        std::uint64_t h = 0x243F6A8885A308D3ULL;
        h = hash_combine(h, static_cast<std::uint64_t>(element_index(g.atoms()[v].element)));
        h = hash_combine(h, static_cast<std::uint64_t>(g.degree(v)));
        h = hash_combine(h, static_cast<std::uint64_t>(g.bond_order_sum(v)));
        h = hash_combine(h, static_cast<std::uint64_t>(g.implicit_hydrogens(v)));
        h = hash_combine(h, static_cast<std::uint64_t>(g.atoms()[v].formal_charge + 8));
        ids[v] = h;
    }

    Fingerprint fp;
    fp.nbits = nbits;
    fp.radius = radius;
    fp.words.assign((nbits + 63) / 64, 0);

    auto set_id = [&](std::uint64_t id) { fp.set(static_cast<int>(id % nbits)); };
    for (std::uint64_t id : ids) set_id(id);

    for (int r = 1; r <= radius; ++r) {
        std::vector<std::uint64_t> next(n);
        for (int v = 0; v < n; ++v) {
            std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
            for (auto [w, o] : g.neighbors(v))
                env.emplace_back(static_cast<std::uint64_t>(o), ids[w]);
            std::sort(env.begin(), env.end());
            std::uint64_t h = hash_combine(0x452821E638D01377ULL, ids[v]);
            for (auto [o, id] : env) {
                h = hash_combine(h, o);
                h = hash_combine(h, id);
            }
            next[v] = h;
        }
        ids = std::move(next);
        for (std::uint64_t id : ids) set_id(id);
    }
    return fp;
}

double tanimoto_distance(const Fingerprint& a, const Fingerprint& b) {
    if (a.nbits != b.nbits) throw std::invalid_argument("fingerprint length mismatch");
    int inter = 0;
    int uni = 0;
    for (std::size_t k = 0; k < a.words.size(); ++k) {
        inter += std::popcount(a.words[k] & b.words[k]);
        uni += std::popcount(a.words[k] | b.words[k]);
    }
    if (uni == 0) return 0.0;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace molcf
