#include "catch_amalgamated.hpp"

#include "support.hpp"

using namespace fencelab;
using support::Rng;

namespace {

StructureMap random_epi_onto(Rng& rng, const StructurePtr& cod, int min_size, int max_size) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto dom = support::random_chain_forest(rng, support::pick(rng, min_size, max_size));
        std::vector<StructureMap> all;
        for_each_epimorphism(dom, cod, [&](const StructureMap& m) {
            all.push_back(m);
            return all.size() < 200;
        });
        if (!all.empty()) return all[static_cast<std::size_t>(support::pick(rng, 0, static_cast<int>(all.size()) - 1))];
    }
    throw std::logic_error("no epimorphism found");
}

ProjectiveSequence random_sequence(Rng& rng, int depth, int max_size) {
    ProjectiveSequence s(support::random_chain_forest(rng, 3));
    for (int n = 1; n <= depth; ++n) {
        auto bond = random_epi_onto(rng, s.level(n - 1), s.level(n - 1)->size(), max_size);
        s.push(bond.dom, bond);
    }
    return s;
}

bool brute_force_forced_lift(const ProjectiveSequence& s, int n, int m, const StructureMap& theta, const std::vector<int>& forced) {
    bool found = false;
    const auto& proj = s.projection(n, m);
    for_each_epimorphism(s.level(m), theta.dom, [&](const StructureMap& psi) {
        for (int v = 0; v < psi.dom->size(); ++v) {
            if (theta(psi(v)) != proj[static_cast<std::size_t>(v)]) return true;
            if (forced[static_cast<std::size_t>(v)] >= 0 && psi(v) != forced[static_cast<std::size_t>(v)]) return true;
        }
        found = true;
        return false;
    });
    return found;
}

}  // namespace

TEST_CASE("projections compose bonds") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_sequence(rng, 4, 7);
        for (int m = 0; m < s.length(); ++m)
            for (int n = 0; n <= m; ++n)
                for (int x = 0; x < s.level(m)->size(); ++x) {
                    int v = x;
                    for (int k = m; k > n; --k) v = s.bonds()[static_cast<std::size_t>(k - 1)](v);
                    CHECK(s.project(n, m, x) == v);
                }
    }
}

TEST_CASE("bad bonds are refused") {
    ProjectiveSequence s(share(chain(2)));
    auto top = share(chain(2));
    CHECK_THROWS_AS(s.push(top, StructureMap{top, s.level(0), {0, 0}}), SequenceError);
}

TEST_CASE("doubling arc is fine one level up") {
    auto s = doubling_arc_sequence(6);
    auto cert = fineness_check(s, 4);
    CHECK(cert.resolved());
    CHECK_FALSE(cert.entries.empty());
    for (const auto& e : cert.entries) {
        REQUIRE(e.witness);
        CHECK(*e.witness == e.level + 1);
        CHECK(fineness_witness_holds(s, e.level, e.a, e.b, *e.witness));
        CHECK(support::brute_force_separated(s, e.level, e.a, e.b, *e.witness));
        CHECK_FALSE(support::brute_force_separated(s, e.level, e.a, e.b, e.level));
    }
}

TEST_CASE("doubling arc irreducibility witnesses") {
    auto s = doubling_arc_sequence(6);
    auto cert = irreducibility_check(s, 4);
    CHECK(cert.resolved());
    for (const auto& e : cert.entries) {
        REQUIRE(e.witness);
        auto [m, b] = *e.witness;
        CHECK(irreducibility_witness_holds(s, e.level, e.a, m, b));
        int last = s.level(e.level)->size() - 1;
        int expect = e.level == 0 ? 0 : (e.a == 0 || e.a == last) ? e.level + 1 : e.level + 2;
        CHECK(m == expect);
    }
}

TEST_CASE("constant chain is never fine") {
    auto s = identity_chain_sequence(3, 5);
    auto cert = fineness_check(s, 2);
    CHECK_FALSE(cert.resolved());
    CHECK(cert.unresolved() == 3);
    auto irr = irreducibility_check(s, 2);
    CHECK_FALSE(irr.resolved());
}

TEST_CASE("certificate entries match brute force on random sequences") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_sequence(rng, 4, 9);
        auto cert = fineness_check(s, 2, 2);
        for (const auto& e : cert.entries) {
            CHECK(r_distance(*s.level(e.level), e.a, e.b) == 2);
            std::optional<int> brute;
            for (int m = e.level + 1; m < s.length() && !brute; ++m)
                if (support::brute_force_separated(s, e.level, e.a, e.b, m)) brute = m;
            CHECK(e.witness == brute);
        }
        auto irr = irreducibility_check(s, 2, 2);
        for (const auto& e : irr.entries) {
            std::optional<int> brute;
            for (int m = e.level; m < s.length() && !brute; ++m)
                for (int b = 0; b < s.level(m)->size() && !brute; ++b) {
                    bool ok = s.project(e.level, m, b) == e.a;
                    for (int w = 0; w < s.level(m)->size(); ++w)
                        if (s.level(m)->r(b, w) && s.project(e.level, m, w) != e.a) ok = false;
                    if (ok) brute = m;
                }
            REQUIRE(e.witness.has_value() == brute.has_value());
            if (brute) CHECK(e.witness->first == *brute);
        }
    }
}

TEST_CASE("extension of the doubling arc through a split") {
    auto s = doubling_arc_sequence(4);
    auto q = share(chain(3));
    StructureMap theta{q, s.level(1), {0, 0, 1}};
    auto ext = extension_witness(s, 1, theta, 4);
    REQUIRE(ext);
    CHECK(ext->m == 2);
    CHECK(ext->psi.f == std::vector<int>{0, 1, 2, 2});
    CHECK_FALSE(support::brute_force_lift_exists(s, 1, 1, theta));
    CHECK(support::brute_force_lift_exists(s, 1, 2, theta));
}

TEST_CASE("lift exists exactly when brute force finds one") {
    Rng rng(43);
    int some = 0, none = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto s = random_sequence(rng, 3, 7);
        int n = support::pick(rng, 0, 1);
        auto theta = random_epi_onto(rng, s.level(n), s.level(n)->size(), s.level(n)->size() + 3);
        for (int m = n; m < s.length(); ++m) {
            std::vector<int> forced(static_cast<std::size_t>(s.level(m)->size()), -1);
            if (trial % 2) {
                int v = support::pick(rng, 0, s.level(m)->size() - 1);
                int want = s.project(n, m, v);
                std::vector<int> over;
                for (int y = 0; y < theta.dom->size(); ++y)
                    if (theta(y) == want) over.push_back(y);
                forced[static_cast<std::size_t>(v)] = over[static_cast<std::size_t>(support::pick(rng, 0, static_cast<int>(over.size()) - 1))];
            }
            auto got = lift_level(s, n, m, theta, forced);
            bool brute = brute_force_forced_lift(s, n, m, theta, forced);
            CHECK(got.has_value() == brute);
            (got ? some : none)++;
            if (got) {
                CHECK(is_epimorphism(*got));
                for (int v = 0; v < s.level(m)->size(); ++v) {
                    CHECK(theta((*got)(v)) == s.project(n, m, v));
                    if (forced[static_cast<std::size_t>(v)] >= 0) CHECK((*got)(v) == forced[static_cast<std::size_t>(v)]);
                }
            }
        }
    }
    CHECK(some > 10);
    CHECK(none > 10);
}

TEST_CASE("endpoint flags follow the end fibers") {
    auto s = doubling_arc_sequence(3);
    auto flags = classify_endpoints(s, 1, 3);
    REQUIRE(flags.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(flags[static_cast<std::size_t>(i)].min_stable == (i < 4));
        CHECK(flags[static_cast<std::size_t>(i)].max_stable == (i >= 4));
    }
    CHECK_THROWS_AS(classify_endpoints(s, 3, 1), SequenceError);
}

TEST_CASE("branch preimages are whole branches and restriction keeps epimorphisms") {
    Rng rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = random_sequence(rng, 4, 8);
        int level = support::pick(rng, 0, 2);
        int nb = static_cast<int>(s.level(level)->chains().size());
        ClopenSet c{level, {support::pick(rng, 0, nb - 1)}};
        for (int m = level; m < s.length(); ++m) {
            auto pre = clopen_preimage(s, c, m);
            std::set<int> inside;
            for (int b : pre.branches)
                for (int v : s.level(m)->chains()[static_cast<std::size_t>(b)]) inside.insert(v);
            for (int v = 0; v < s.level(m)->size(); ++v) {
                int p = s.project(level, m, v);
                bool over = s.level(level)->chain_of(p) == c.branches[0];
                CHECK(over == static_cast<bool>(inside.count(v)));
            }
        }
        auto r = restrict_to_clopen(s, c);
        CHECK(r.length() == s.length() - level);
        for (const auto& b : r.bonds()) CHECK(is_epimorphism(b));
        for (int k = 0; k < r.length(); ++k)
            for (const auto& id : r.level(k)->ids()) CHECK(s.level(level + k)->find(id).has_value());
    }
}

TEST_CASE("arc witnesses on the doubling arc") {
    auto s = doubling_arc_sequence(5);
    auto cert = arc_check(s, 3);
    // one branch per level, so only the pair of ends ever gets a witness
    for (const auto& e : cert.entries) {
        bool ends = e.a == 0 && e.a2 == s.level(e.level)->size() - 1;
        CHECK(e.witness.has_value() == ends);
        if (e.witness) CHECK(arc_witness_holds(s, e.level, e.a, e.a2, *e.witness));
    }
    auto w = arc_witness(s, 2, 0, 3, 5);
    REQUIRE(w);
    CHECK(arc_witness_holds(s, 2, 0, 3, *w));
    CHECK_FALSE(arc_witness(s, 2, 1, 2, 5).has_value());
}

TEST_CASE("back and forth honours ends and fixes") {
    auto s = doubling_arc_sequence(4);
    auto p = share(chain(3));
    BackAndForthRequest req;
    req.n = 1;
    req.phi = StructureMap{p, s.level(1), {0, 0, 1}};
    req.targets.push_back({{0, 1, 2}, 0});
    req.fixes.push_back({0, 0});
    auto got = back_and_forth_step(s, req, 4);
    REQUIRE(got);
    const auto& psi = got->psi;
    CHECK(is_epimorphism(psi));
    const auto& pm = s.projection(got->m, 4);
    CHECK(psi(pm[0]) == 0);
    CHECK(psi(pm[15]) == 2);
    for (int v = 0; v < psi.dom->size(); ++v) CHECK(req.phi(psi(v)) == s.project(1, got->m, v));

    BackAndForthRequest bad = req;
    bad.targets = {{{0, 2}, 0}};
    CHECK_THROWS_AS(back_and_forth_step(s, bad, 4), SequenceError);
    bad = req;
    bad.fixes = {{2, 0}};
    CHECK_THROWS_AS(back_and_forth_step(s, bad, 4), SequenceError);
}
