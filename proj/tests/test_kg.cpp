#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>

#include "kgalign/kg.hpp"
#include "oracles.hpp"

using namespace kgalign;

namespace {

std::vector<LabeledTriple> path_abc() {
    return {{"a", "r", "b"}, {"b", "r", "c"}};
}

}  // namespace

TEST_CASE("build_graph on a single triple") {
    const auto g = build_graph({{"a", "r", "b"}});
    CHECK(g.entity_count() == 2);
    CHECK(g.relation_count() == 1);
    CHECK(g.triple_count() == 1);
    CHECK(g.neighbors(0) == std::vector<std::pair<EntityId, double>>{{1, 1.0}});
    CHECK(g.neighbors(1) == std::vector<std::pair<EntityId, double>>{{0, 1.0}});
}

TEST_CASE("build_graph drops duplicate triples") {
    const auto g = build_graph({{"a", "r", "b"}, {"a", "r", "b"}});
    CHECK(g.triple_count() == 1);
    CHECK(g.neighbors(0).front().second == 1.0);
}

TEST_CASE("build_graph ids follow first appearance and are dense") {
    const auto g = build_graph({{"x", "r", "y"}, {"z", "r", "x"}});
    CHECK(g.entities.label(0) == "x");
    CHECK(g.entities.label(1) == "y");
    CHECK(g.entities.label(2) == "z");
    for (EntityId e = 0; e < g.entity_count(); ++e) {
        CHECK(g.entities.find(g.entities.label(e)) == e);
    }
}

TEST_CASE("build_graph entity count matches hash-set oracle on random triples") {
    Rng rng(42);
    std::vector<LabeledTriple> triples;
    std::set<std::string> labels;
    for (int i = 0; i < 1000; ++i) {
        const std::string h = "e" + std::to_string(rng.index(200));
        const std::string t = "e" + std::to_string(rng.index(200));
        triples.push_back({h, "r" + std::to_string(rng.index(5)), t});
        labels.insert(h);
        labels.insert(t);
    }
    const auto g = build_graph(triples);
    CHECK(g.entity_count() == labels.size());
}

TEST_CASE("build_graph rejects empty input and empty labels") {
    CHECK_THROWS_WITH_AS(build_graph({}), "empty graph", std::invalid_argument);
    CHECK_THROWS_AS(build_graph({{"", "r", "b"}}), std::invalid_argument);
}

TEST_CASE("multi-edges collapse with summed weight, self-loops excluded from adjacency") {
    const auto g = build_graph({{"a", "r1", "b"}, {"a", "r2", "b"}, {"b", "r1", "a"}, {"a", "r1", "a"}});
    CHECK(g.triple_count() == 4);
    const auto nbrs = g.neighbors(0);
    REQUIRE(nbrs.size() == 1);
    CHECK(nbrs[0].first == 1);
    CHECK(nbrs[0].second == 3.0);  // three parallel triples, self-loop dropped
}

TEST_CASE("neighbors on a path and on an isolated entity") {
    auto triples = path_abc();
    triples.push_back({"d", "r", "d"});  // d only appears in a self-loop
    const auto g = build_graph(triples);
    const auto b = *g.entities.find("b");
    const auto nbrs = g.neighbors(b);
    REQUIRE(nbrs.size() == 2);
    CHECK(nbrs[0].first == *g.entities.find("a"));
    CHECK(nbrs[1].first == *g.entities.find("c"));
    CHECK(g.neighbors(*g.entities.find("d")).empty());
    CHECK_THROWS_AS(g.neighbors(99), std::out_of_range);
}

TEST_CASE("neighbor sets equal the dense adjacency oracle on a random graph") {
    Rng rng(7);
    std::vector<LabeledTriple> triples;
    for (int i = 0; i < 400; ++i) {
        triples.push_back({"n" + std::to_string(rng.index(60)), "r",
                           "n" + std::to_string(rng.index(60))});
    }
    const auto g = build_graph(triples);
    const auto dense = oracles::dense_adjacency(g);
    for (EntityId e = 0; e < g.entity_count(); ++e) {
        std::vector<std::pair<EntityId, double>> expected;
        for (EntityId o = 0; o < g.entity_count(); ++o) {
            if (dense[e][o] > 0.0) expected.emplace_back(o, dense[e][o]);
        }
        CHECK(g.neighbors(e) == expected);
    }
}

TEST_CASE("triples round-trip back to their labels") {
    Rng rng(3);
    std::vector<LabeledTriple> triples;
    for (int i = 0; i < 50; ++i) {
        triples.push_back({"h" + std::to_string(rng.index(20)), "rel" + std::to_string(rng.index(4)),
                           "t" + std::to_string(rng.index(20))});
    }
    const auto g = build_graph(triples);
    std::set<std::tuple<std::string, std::string, std::string>> input;
    for (const auto& t : triples) input.insert({t.head, t.relation, t.tail});
    std::set<std::tuple<std::string, std::string, std::string>> output;
    for (const auto& t : g.triples) {
        output.insert({g.entities.label(t.head), g.relations.label(t.relation),
                       g.entities.label(t.tail)});
    }
    CHECK(input == output);
}

TEST_CASE("undirected adjacency is symmetric with equal weights") {
    Rng rng(9);
    std::vector<LabeledTriple> triples;
    for (int i = 0; i < 300; ++i) {
        triples.push_back({"v" + std::to_string(rng.index(40)), "r",
                           "v" + std::to_string(rng.index(40))});
    }
    const auto g = build_graph(triples);
    for (EntityId e = 0; e < g.entity_count(); ++e) {
        for (const auto& [nbr, w] : g.neighbors(e)) {
            bool back = false;
            for (const auto& [other, w2] : g.neighbors(nbr)) {
                if (other == e) {
                    back = true;
                    CHECK(w2 == w);
                }
            }
            CHECK(back);
        }
    }
}

TEST_CASE("seed alignment enforces 1-to-1 and id validity") {
    CHECK_THROWS_AS(make_seed_alignment({{0, 1}, {0, 2}}, SeedKind::TrainSeed),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_seed_alignment({{0, 1}, {2, 1}}, SeedKind::TrainSeed),
                    std::invalid_argument);
    const auto ok = make_seed_alignment({{0, 1}, {1, 0}}, SeedKind::TrainSeed);
    CHECK(ok.size() == 2);

    const auto g = build_graph(path_abc());
    SeedAlignment bad{{{0, 99}}, SeedKind::TrainSeed};
    CHECK_THROWS_AS(validate_seed_alignment(bad, g, g), std::out_of_range);
}

TEST_CASE("merge_seed_alignments keeps base pairs on conflict") {
    SeedAlignment base{{{0, 0}, {1, 1}}, SeedKind::TrainSeed};
    SeedAlignment extra{{{1, 5}, {4, 1}, {2, 2}}, SeedKind::PseudoSeed};
    const auto merged = merge_seed_alignments(base, extra, SeedKind::TrainSeed);
    CHECK(merged.pairs == std::vector<std::pair<EntityId, EntityId>>{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("triples and seed files round-trip through their loaders") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "kgalign_kg_io_test";
    fs::create_directories(dir);

    const auto g = build_graph({{"alpha one", "likes", "beta two"}, {"beta two", "r", "gamma"}});
    const auto triples_path = (dir / "g.tsv").string();
    save_triples_file(triples_path, g);
    const auto loaded = load_graph(triples_path);
    CHECK(loaded.entity_count() == g.entity_count());
    CHECK(loaded.triple_count() == g.triple_count());
    CHECK(loaded.entities.label(0) == "alpha one");

    SeedAlignment seeds{{{0, 1}, {2, 0}}, SeedKind::TrainSeed};
    const auto seeds_path = (dir / "seeds.tsv").string();
    save_seed_file(seeds_path, seeds, g, g);
    const auto seeds_loaded = load_seed_file(seeds_path, loaded, loaded, SeedKind::TrainSeed);
    CHECK(seeds_loaded.pairs == seeds.pairs);

    // Comment lines are ignored.
    {
        FILE* f = fopen(triples_path.c_str(), "a");
        fputs("# comment line\n", f);
        fclose(f);
    }
    CHECK(load_graph(triples_path).triple_count() == g.triple_count());
    fs::remove_all(dir);
}
