#include "catch_amalgamated.hpp"

#include "fencelab/fence.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>

using namespace fencelab;
using support::Rng;

namespace {

PieceNode node(const char* lo, const char* hi, std::vector<PieceNode> children = {}) {
    return PieceNode{parse_rational(lo), parse_rational(hi), std::move(children)};
}

FancyPairSpec spec_of(PieceNode root) { return FancyPairSpec{std::move(root)}; }

FancyPairSpec nested_spec() {
    return spec_of(node("1/8", "7/8", {node("1/8", "7/8"), node("1/4", "1/2", {node("1/4", "1/2"), node("1/3", "1/3")})}));
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("decimal formatting rounds ties to even") {
    CHECK(format_decimal(Rational(1, 8), 2) == "0.12");
    CHECK(format_decimal(Rational(3, 8), 2) == "0.38");
    CHECK(format_decimal(Rational(1, 3), 9) == "0.333333333");
    CHECK(format_decimal(Rational(1), 3) == "1.000");
    CHECK(parse_rational("6/8") == Rational(3, 4));
    CHECK_THROWS(parse_rational("x/2"));
}

TEST_CASE("fancy pair validation names the offending node") {
    CHECK(validate_fancy_pair(nested_spec()).valid);
    CHECK_FALSE(validate_fancy_pair(FancyPairSpec{}).valid);
    auto zero = validate_fancy_pair(spec_of(node("0", "1/2")));
    CHECK_FALSE(zero.valid);
    CHECK(zero.path == "r");
    auto upside = validate_fancy_pair(spec_of(node("1/4", "3/4", {node("1/4", "3/4"), node("1/2", "1/3")})));
    CHECK_FALSE(upside.valid);
    CHECK(upside.path == "r.1");
    auto unattained = validate_fancy_pair(spec_of(node("1/4", "3/4", {node("1/4", "1/2"), node("1/3", "1/2")})));
    CHECK_FALSE(unattained.valid);
    CHECK(unattained.path == "r");
    auto escape = validate_fancy_pair(spec_of(node("1/4", "3/4", {node("1/4", "3/4"), node("1/8", "1/2")})));
    CHECK_FALSE(escape.valid);
    CHECK(escape.path == "r.1");
}

TEST_CASE("carved parts satisfy the carving inequality and partition each coarse part") {
    Rng rng(61);
    for (int trial = 0; trial < 300; ++trial) {
        int leaves = support::pick(rng, 1, 12);
        std::vector<StepLeaf> env;
        for (int i = 0; i < leaves; ++i) {
            int a = support::pick(rng, 1, 30), b = support::pick(rng, 1, 30);
            env.push_back({Rational(std::min(a, b), 32), Rational(std::max(a, b), 32)});
        }
        std::vector<int> order(static_cast<std::size_t>(leaves));
        for (int i = 0; i < leaves; ++i) order[static_cast<std::size_t>(i)] = i;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::vector<int>> coarse(1);
        for (int l : order) {
            if (!coarse.back().empty() && support::pick(rng, 0, 3) == 0) coarse.emplace_back();
            coarse.back().push_back(l);
        }
        Rational eps(support::pick(rng, 1, 8), 32);
        auto parts = carve_partition(env, coarse, eps);
        std::vector<int> seen(static_cast<std::size_t>(leaves), 0);
        for (const auto& part : parts) {
            // inequality recomputed here from scratch
            Rational lo = env[static_cast<std::size_t>(part.leaves[0])].lo, hi = env[static_cast<std::size_t>(part.leaves[0])].hi;
            for (int l : part.leaves) {
                lo = std::min(lo, env[static_cast<std::size_t>(l)].lo);
                hi = std::max(hi, env[static_cast<std::size_t>(l)].hi);
                ++seen[static_cast<std::size_t>(l)];
            }
            const auto& x = env[static_cast<std::size_t>(part.attainer)];
            CHECK(std::count(part.leaves.begin(), part.leaves.end(), part.attainer) == 1);
            CHECK(x.lo - lo < eps);
            CHECK(hi - x.hi < eps);
            CHECK(carve_inequality_holds(env, part, eps));
            int home = -1;
            for (std::size_t c = 0; c < coarse.size(); ++c)
                if (std::count(coarse[c].begin(), coarse[c].end(), part.leaves[0])) home = static_cast<int>(c);
            for (int l : part.leaves) CHECK(std::count(coarse[static_cast<std::size_t>(home)].begin(), coarse[static_cast<std::size_t>(home)].end(), l) == 1);
        }
        for (int s : seen) CHECK(s == 1);
    }
    CHECK_THROWS_AS(carve_partition({{Rational(1, 4), Rational(1, 2)}}, {{0}}, Rational(0)), FenceError);
    CHECK_THROWS_AS(carve_partition({{Rational(1, 4), Rational(1, 2)}}, {}, Rational(1, 8)), FenceError);
}

TEST_CASE("cuts refine, increase and avoid") {
    Rng rng(62);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Rational> avoid;
        for (int i = 0; i < 6; ++i) avoid.push_back(Rational(support::pick(rng, 1, 63), 64));
        avoid.push_back(Rational(1, 2));
        std::vector<Rational> prev;
        for (int n = 0; n <= 7; ++n) {
            auto cuts = canonical_cuts(n, avoid);
            CHECK(cuts.size() == static_cast<std::size_t>((1 << n) - 1));
            for (std::size_t i = 0; i < cuts.size(); ++i) {
                CHECK(cuts[i] > 0);
                CHECK(cuts[i] < 1);
                if (i) CHECK(cuts[i - 1] < cuts[i]);
                CHECK(std::find(avoid.begin(), avoid.end(), cuts[i]) == avoid.end());
            }
            for (const auto& c : prev) CHECK(std::binary_search(cuts.begin(), cuts.end(), c));
            prev = cuts;
        }
    }
    CHECK(canonical_cuts(1, {}) == std::vector<Rational>{Rational(1, 2)});
    CHECK(canonical_cuts(1, {Rational(1, 2)}) == std::vector<Rational>{Rational(5, 8)});
    CHECK(canonical_cuts(2, {Rational(1, 2)}) == std::vector<Rational>{Rational(1, 4), Rational(5, 8), Rational(3, 4)});
    CHECK(canonical_cuts(2, {Rational(1, 4), Rational(3, 4)}) == std::vector<Rational>{Rational(5, 16), Rational(1, 2), Rational(13, 16)});
}

TEST_CASE("degenerate envelope gives singleton columns") {
    auto a = build_approximation(spec_of(node("1/2", "1/2")), 6);
    for (int n = 1; n <= 6; ++n) {
        const auto& cx = a.complexes[static_cast<std::size_t>(n)];
        CHECK(cx.pieces.size() == static_cast<std::size_t>(1 << n));
        for (std::size_t p = 0; p < cx.pieces.size(); ++p) CHECK(cx.column(static_cast<int>(p)).size() == 1);
    }
}

TEST_CASE("quarter band cell counts") {
    auto a = build_approximation(spec_of(node("1/4", "3/4")), 5);
    std::vector<std::size_t> per_column{1, 2, 3, 5, 9, 17};
    for (int n = 0; n <= 5; ++n) {
        const auto& cx = a.complexes[static_cast<std::size_t>(n)];
        for (std::size_t p = 0; p < cx.pieces.size(); ++p) CHECK(cx.column(static_cast<int>(p)).size() == per_column[static_cast<std::size_t>(n)]);
    }
    CHECK(a.complexes[1].cells.size() == 4);
}

TEST_CASE("cells are exactly the intervals meeting each envelope") {
    for (const auto& spec : {nested_spec(), spec_of(node("1/4", "3/4")), spec_of(node("1/2", "1/2"))}) {
        auto a = build_approximation(spec, 6);
        for (const auto& cx : a.complexes) {
            std::set<std::pair<int, int>> have;
            for (const auto& c : cx.cells) have.insert({c.piece, c.interval});
            for (std::size_t p = 0; p < cx.pieces.size(); ++p)
                for (int j = 0; j < cx.interval_count(); ++j) {
                    bool meets = !(cx.pieces[p].lo > cx.interval_hi(j)) && !(cx.pieces[p].hi < cx.interval_lo(j));
                    CHECK(meets == static_cast<bool>(have.count({static_cast<int>(p), j})));
                }
        }
        for (const auto& b : a.seq.bonds()) {
            CHECK(is_epimorphism(b));
        }
    }
}

TEST_CASE("bond sends each cell to the cell containing it") {
    auto a = build_approximation(nested_spec(), 5);
    for (int n = 1; n <= 5; ++n) {
        const auto& cx = a.complexes[static_cast<std::size_t>(n)];
        const auto& prev = a.complexes[static_cast<std::size_t>(n - 1)];
        const auto& bond = a.seq.bonds()[static_cast<std::size_t>(n - 1)];
        for (const auto& c : cx.cells) {
            int img = bond(bond.dom->index(c.id));
            const Id& target = bond.cod->id(img);
            const Cell* pc = nullptr;
            for (const auto& d : prev.cells)
                if (d.id == target) pc = &d;
            REQUIRE(pc);
            CHECK(cx.pieces[static_cast<std::size_t>(c.piece)].parent == pc->piece);
            CHECK(prev.interval_lo(pc->interval) <= cx.interval_lo(c.interval));
            CHECK(cx.interval_hi(c.interval) <= prev.interval_hi(pc->interval));
        }
    }
}

TEST_CASE("a band no child carries breaks the bond") {
    // each end of r.0 is attained, but by different children
    auto split = node("1/4", "3/4", {node("1/4", "3/8"), node("5/8", "3/4")});
    auto spec = spec_of(node("1/4", "3/4", {split, node("1/4", "3/4")}));
    CHECK(validate_fancy_pair(spec).valid);
    CHECK_NOTHROW(build_approximation(spec, 1));
    CHECK_THROWS_AS(build_approximation(spec, 2), FenceError);
}

TEST_CASE("realizations: nesting, quasi-partition and mesh") {
    auto a = build_approximation(spec_of(node("1/4", "3/4")), 8);
    auto r = realize_cells(a);
    Rational last = 2;
    for (int n = 0; n <= 8; ++n) {
        const auto& cells = r.levels[static_cast<std::size_t>(n)];
        CHECK(is_regular_quasi_partition(cells));
        Rational m = mesh(r, n);
        CHECK(m <= last);
        last = m;
        if (n) {
            const auto& bond = a.seq.bonds()[static_cast<std::size_t>(n - 1)];
            for (const auto& c : cells) {
                const Id& up = bond.cod->id(bond(bond.dom->index(c.id)));
                for (const auto& d : r.levels[static_cast<std::size_t>(n - 1)])
                    if (d.id == up) {
                        CHECK(d.rect.x0 <= c.rect.x0);
                        CHECK(c.rect.x1 <= d.rect.x1);
                        CHECK(d.rect.y0 <= c.rect.y0);
                        CHECK(c.rect.y1 <= d.rect.y1);
                    }
            }
        }
    }
    CHECK(mesh(r, 8) <= Rational(1, 10));

    auto abs = realize_abstract(doubling_arc_sequence(5));
    for (int n = 0; n <= 5; ++n) {
        CHECK(is_regular_quasi_partition(abs.levels[static_cast<std::size_t>(n)]));
        CHECK(mesh(abs, n) == 1);
    }
    std::vector<RealizedCell> overlap{{"a", {0, 1, 0, Rational(1, 2)}}, {"b", {Rational(1, 2), 1, Rational(1, 4), 1}}};
    CHECK_FALSE(is_regular_quasi_partition(overlap));
    std::vector<RealizedCell> flat{{"a", {0, 1, 0, 0}}};
    CHECK_FALSE(is_regular_quasi_partition(flat));
}

TEST_CASE("svg output is stable") {
    auto a = build_approximation(nested_spec(), 4);
    auto r = realize_cells(a);
    auto one = render_svg(r, 3);
    CHECK(one == render_svg(realize_cells(build_approximation(nested_spec(), 4)), 3));
    CHECK(count(one, "<rect ") == r.levels[3].size());
    auto half = render_svg(realize_cells(build_approximation(spec_of(node("1/2", "1/2")), 0)), 0);
    CHECK(half.find("<rect data-id=\"r@0\" x=\"0.000000000\" y=\"0.000000000\" width=\"1.000000000\" height=\"1.000000000\"/>") !=
          std::string::npos);
    CHECK(half.find("viewBox=\"0 0 1 1\"") != std::string::npos);
    CHECK_THROWS_AS(render_svg(r, 9), FenceError);
}
