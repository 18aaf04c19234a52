#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "molcf/fingerprint.hpp"
#include "molcf/oracle.hpp"
#include "molcf/scaffold.hpp"
#include "molcf/smiles.hpp"

using namespace molcf;

namespace {

const std::vector<std::string> kCorpus = {
    "C",      "N",     "O",          "F",          "CC",           "C=C",
    "C#C",    "CCO",   "OCC",        "CC(=O)O",    "C1=CC=CC=C1",  "CCC1=CC=CC=C1",
    "C1CC1",  "C1CCCCC1",            "N1C=CC=C1",  "C(F)(F)(F)F",  "N#N",
    "O=C=O",  "CN(C)C","CC(C)(C)C",  "C1=CC=CC=C1C1=CC=CC=C1",     "OC1CCCC1O",
    "C#CC#C", "FC(F)C(F)F",          "CC(N)C(=O)O"};

MolecularGraph random_relabel(const MolecularGraph& g, std::mt19937_64& rng) {
    std::vector<int> perm(g.num_atoms());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    return g.permuted(perm);
}

}  // namespace

TEST_CASE("single atom parses to one node") {
    MolecularGraph g = parse_smiles("C");
    CHECK(g.num_atoms() == 1);
    CHECK(g.num_bonds() == 0);
    CHECK(g.atoms()[0].element == Element::C);
    CHECK(g.implicit_hydrogens(0) == 4);
}

TEST_CASE("kekulized benzene ring structure") {
    MolecularGraph g = parse_smiles("C1=CC=CC=C1");
    CHECK(g.num_atoms() == 6);
    CHECK(g.num_bonds() == 6);
    std::multiset<int> orders;
    for (const auto& b : g.bonds()) orders.insert(b.order.order);
    CHECK(orders == std::multiset<int>{1, 1, 1, 2, 2, 2});
    // alternation: every ring atom carries exactly one single and one double bond
    for (int v = 0; v < 6; ++v) {
        std::multiset<int> inc;
        for (auto [w, o] : g.neighbors(v)) inc.insert(o);
        CHECK(inc == std::multiset<int>{1, 2});
        CHECK(g.implicit_hydrogens(v) == 1);
    }
}

TEST_CASE("valence violation is rejected") {
    CHECK_THROWS_AS(parse_smiles("O(C)(C)C"), GraphError);
    CHECK_THROWS_AS(parse_smiles("C#N#C"), GraphError);
    CHECK_THROWS_AS(parse_smiles("F=C"), GraphError);
}

TEST_CASE("parser reports syntax errors with position") {
    try {
        parse_smiles("CC)C");
        FAIL("expected parse error");
    } catch (const SmilesParseError& e) {
        CHECK(e.position == 2);
    }
    CHECK_THROWS_AS(parse_smiles("C=("), SmilesParseError);
    CHECK_THROWS_AS(parse_smiles("C="), SmilesParseError);
    CHECK_THROWS_AS(parse_smiles("=C"), SmilesParseError);
    CHECK_THROWS_AS(parse_smiles(""), SmilesParseError);
    CHECK_THROWS_AS(parse_smiles("C(C"), SmilesParseError);
}

TEST_CASE("unmatched or degenerate ring closures") {
    CHECK_THROWS_AS(parse_smiles("C1CC"), SmilesParseError);
    CHECK_THROWS_AS(parse_smiles("C11"), SmilesParseError);
    CHECK_THROWS_AS(parse_smiles("C1=CC=CC=1C1"), SmilesParseError);
}

TEST_CASE("unsupported element") {
    CHECK_THROWS(parse_smiles("CS"));
    CHECK_THROWS(parse_smiles("c1ccccc1"));   // aromatic lowercase not in the grammar
}

TEST_CASE("conflicting ring bond orders") {
    CHECK_THROWS_AS(parse_smiles("C=1CCCC#1"), SmilesParseError);
}

TEST_CASE("write_smiles canonical basics") {
    CHECK(write_smiles(parse_smiles("C")) == "C");
    CHECK(write_smiles(parse_smiles("CCO")) == write_smiles(parse_smiles("OCC")));
    CHECK(write_smiles(parse_smiles("C1=CC=CC=C1")) ==
          write_smiles(parse_smiles("C=1C=CC=CC=1")));
}

TEST_CASE("benzene canonical string is rotation invariant") {
    MolecularGraph g = parse_smiles("C1=CC=CC=C1");
    std::string canon = write_smiles(g);
    for (int shift = 0; shift < 6; ++shift) {
        std::vector<int> perm(6);
        for (int i = 0; i < 6; ++i) perm[i] = (i + shift) % 6;
        CHECK(write_smiles(g.permuted(perm)) == canon);
    }
}

TEST_CASE("round trip over the corpus") {
    for (const auto& s : kCorpus) {
        CAPTURE(s);
        MolecularGraph g = parse_smiles(s);
        std::string w = write_smiles(g);
        MolecularGraph g2 = parse_smiles(w);
        CHECK(write_smiles(g2) == w);
        CHECK(g2.num_atoms() == g.num_atoms());
        CHECK(g2.num_bonds() == g.num_bonds());
    }
}

TEST_CASE("canonical invariance under random relabeling") {
    std::mt19937_64 rng(42);
    for (const auto& s : kCorpus) {
        CAPTURE(s);
        MolecularGraph g = parse_smiles(s);
        for (int t = 0; t < 5; ++t) {
            MolecularGraph h = random_relabel(g, rng);
            CHECK(write_smiles(h) == write_smiles(g));
            CHECK(morgan_fingerprint(h) == morgan_fingerprint(g));
            CHECK(murcko_scaffold(h) == murcko_scaffold(g));
        }
    }
}

TEST_CASE("valence safety along random edit walks") {
    std::mt19937_64 rng(7);
    MolecularGraph g = parse_smiles("C");
    for (int step = 0; step < 60; ++step) {
        g = random_molecule(g, 1, rng);
        for (int v = 0; v < g.num_atoms(); ++v) {
            CHECK(g.bond_order_sum(v) <= element_info(g.atoms()[v].element).max_valence);
        }
    }
}

TEST_CASE("morgan fingerprint basics") {
    MolecularGraph methane = parse_smiles("C");
    Fingerprint fp0 = morgan_fingerprint(methane, 0, 1024);
    CHECK(fp0.popcount() == 1);

    MolecularGraph nitrogen = parse_smiles("N");
    CHECK_FALSE(morgan_fingerprint(methane) == morgan_fingerprint(nitrogen));

    // non-empty graphs always set at least one bit
    for (const auto& s : kCorpus) CHECK(morgan_fingerprint(parse_smiles(s)).popcount() >= 1);

    CHECK_THROWS(morgan_fingerprint(methane, -1, 1024));
    CHECK_THROWS(morgan_fingerprint(methane, 2, 32));
}

TEST_CASE("tanimoto distance") {
    Fingerprint a, b;
    a.nbits = b.nbits = 64;
    a.words = {0};
    b.words = {0};
    CHECK(tanimoto_distance(a, b) == 0.0);   // both empty

    a.set(3);
    Fingerprint c = a;
    CHECK(tanimoto_distance(a, c) == 0.0);

    b.set(9);
    CHECK(tanimoto_distance(a, b) == 1.0);   // disjoint non-empty

    Fingerprint d = a;
    d.set(9);   // d = {3, 9}, a = {3}: intersection 1, union 2
    CHECK(tanimoto_distance(a, d) == doctest::Approx(0.5));

    Fingerprint wide;
    wide.nbits = 128;
    wide.words = {0, 0};
    CHECK_THROWS(tanimoto_distance(a, wide));
}

TEST_CASE("tanimoto is a bounded semimetric over corpus fingerprints") {
    std::vector<Fingerprint> fps;
    for (const auto& s : kCorpus) fps.push_back(morgan_fingerprint(parse_smiles(s)));
    for (const auto& x : fps)
        for (const auto& y : fps) {
            double d = tanimoto_distance(x, y);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            CHECK(d == tanimoto_distance(y, x));
            if (x == y) CHECK(d == 0.0);
            if (d == 0.0) CHECK(x == y);
        }
}

TEST_CASE("murcko scaffold") {
    std::string benzene = write_smiles(parse_smiles("C1=CC=CC=C1"));
    CHECK(murcko_scaffold(parse_smiles("C1=CC=CC=C1")) == benzene);
    CHECK(murcko_scaffold(parse_smiles("CCC1=CC=CC=C1")) == benzene);
    CHECK(murcko_scaffold(parse_smiles("CCC")) == kAcyclicScaffold);
    CHECK(murcko_scaffold(parse_smiles("C")) == kAcyclicScaffold);
    // two rings joined by a linker keep the linker
    MolecularGraph biphenyl_chain = parse_smiles("C1CC1CCC1CC1");
    std::string scaffold = murcko_scaffold(biphenyl_chain);
    CHECK(scaffold == write_smiles(biphenyl_chain));   // nothing to prune
    MolecularGraph decorated = parse_smiles("CC1CC1CCC1CC1C");
    CHECK(murcko_scaffold(decorated) == scaffold);
}

TEST_CASE("node and edge features have the documented layout") {
    MolecularGraph g = parse_smiles("C=O");
    auto nf = g.node_features();
    REQUIRE(nf.size() == 2);
    REQUIRE(nf[0].size() == 6);
    CHECK(nf[0][0] == 1.0);   // carbon one-hot
    CHECK(nf[0][4] == doctest::Approx(12.011));
    CHECK(nf[0][5] == 0.0);
    CHECK(nf[1][2] == 1.0);   // oxygen one-hot
    auto ef = g.edge_features();
    REQUIRE(ef.size() == 1);
    CHECK(ef[0] == std::vector<double>{0.0, 1.0, 0.0});
}
