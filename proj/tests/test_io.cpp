#include "catch_amalgamated.hpp"

#include "fencelab/io.hpp"
#include "support.hpp"

using namespace fencelab;
using support::Rng;

TEST_CASE("structures round trip") {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = support::random_forest(rng, support::pick(rng, 1, 10));
        auto back = structure_from_json(structure_to_json(*s));
        CHECK(same_structure(*s, back));
        CHECK(dump(structure_to_json(back)) == dump(structure_to_json(*s)));
    }
    auto chains = Structure::chains_of_lengths({2, 3});
    auto j = structure_to_json(chains);
    CHECK(j.contains("chains"));
    CHECK(same_structure(structure_from_json(j), chains));
}

TEST_CASE("declared kind must match") {
    auto j = Json::parse(R"({"kind": "f0", "elements": ["a", "b", "c"], "covers": [["a", "b"], ["a", "c"]]})");
    CHECK_THROWS_AS(structure_from_json(j), FormatError);
    j["kind"] = "hforest";
    CHECK(structure_from_json(j).kind() == Kind::HForest);
}

TEST_CASE("malformed input is a format error") {
    CHECK_THROWS_AS(structure_from_json(Json::parse("[1,2]")), FormatError);
    CHECK_THROWS_AS(structure_from_json(Json::parse(R"({"elements": ["a"], "covers": [["a"]]})")), FormatError);
    CHECK_THROWS_AS(structure_from_json(Json::parse(R"({"elements": [1], "covers": []})")), FormatError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), FormatError);
    CHECK_THROWS_AS(fancy_from_json(Json::parse("3")), FormatError);
    CHECK_THROWS_AS(realization_from_json(Json::parse(R"([{"level": 0, "id": "a", "rect": ["0", "1"]}])")), FormatError);
}

TEST_CASE("maps round trip, inline and by path") {
    Rng rng(72);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = support::random_forest(rng, support::pick(rng, 1, 4), "a");
        auto m = support::random_cover_of(rng, a, 8, "b");
        auto back = map_from_json(map_to_json(m), ".");
        CHECK(map_to_ids(back) == map_to_ids(m));
        auto bare = map_from_json(map_to_json(m, false), ".", m.dom, m.cod);
        CHECK(map_to_ids(bare) == map_to_ids(m));
    }
    std::filesystem::path data = FENCELAB_DATA;
    auto phi = load_map(data / "fig1-phi.json");
    CHECK(phi.dom->size() == 5);
    CHECK(phi.cod->size() == 4);
}

TEST_CASE("sequences round trip with their log") {
    GeneratorOptions opt;
    opt.depth = 6;
    opt.max_size = 4;
    auto g = generate_fundamental(opt);
    auto text = dump(sequence_to_json(g.seq, g.log));
    auto back = sequence_from_json(Json::parse(text));
    CHECK(back.seq.length() == g.seq.length());
    CHECK(back.log.size() == g.log.size());
    CHECK(dump(sequence_to_json(back.seq, back.log)) == text);
    for (int n = 0; n < g.seq.length(); ++n) CHECK(same_structure(*back.seq.level(n), *g.seq.level(n)));
}

TEST_CASE("fancy pairs and realizations round trip") {
    std::filesystem::path data = FENCELAB_DATA;
    auto spec = fancy_from_json(read_json_file(data / "fancy-steps.json"));
    CHECK(validate_fancy_pair(spec).valid);
    CHECK(dump(fancy_to_json(fancy_from_json(fancy_to_json(spec)))) == dump(fancy_to_json(spec)));
    auto r = realize_cells(build_approximation(spec, 4));
    auto j = realization_to_json(r);
    auto back = realization_from_json(j);
    REQUIRE(back.levels.size() == r.levels.size());
    for (std::size_t n = 0; n < r.levels.size(); ++n) {
        REQUIRE(back.levels[n].size() == r.levels[n].size());
        for (std::size_t i = 0; i < r.levels[n].size(); ++i) {
            CHECK(back.levels[n][i].id == r.levels[n][i].id);
            CHECK(back.levels[n][i].rect.x0 == r.levels[n][i].rect.x0);
            CHECK(back.levels[n][i].rect.y1 == r.levels[n][i].rect.y1);
        }
    }
    CHECK(render_svg(back, 3) == render_svg(r, 3));
}

TEST_CASE("back and forth requests resolve ids") {
    auto s = doubling_arc_sequence(4);
    auto j = Json::parse(R"({
        "n": 1,
        "phi": {"dom": {"kind": "f0", "chains": [["p0", "p1", "p2"]]}, "map": {"p0": "0", "p1": "0", "p2": "1"}},
        "targets": [{"image": ["p0", "p1", "p2"], "branch": 0}],
        "fixes": [{"y": "p0", "x": "00"}]
    })");
    auto req = request_from_json(j, s, ".", 4);
    CHECK(req.n == 1);
    REQUIRE(req.targets.size() == 1);
    CHECK(req.targets[0].image.size() == 3);
    REQUIRE(req.fixes.size() == 1);
    CHECK(req.fixes[0].x == 0);
    CHECK(back_and_forth_step(s, req, 4).has_value());
}
