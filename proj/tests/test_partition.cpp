#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "kgalign/partition.hpp"
#include "oracles.hpp"

using namespace kgalign;

namespace {

// Two planted communities of `size` vertices joined by `bridges` edges.
KnowledgeGraph two_communities(int size, int bridges, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledTriple> triples;
    auto name = [](int i) { return "v" + std::to_string(i); };
    for (int c = 0; c < 2; ++c) {
        const int base = c * size;
        for (int i = 0; i < size; ++i) {
            triples.push_back({name(base + i), "r", name(base + (i + 1) % size)});
        }
        for (int i = 0; i < size * 2; ++i) {
            const int u = base + static_cast<int>(rng.index(size));
            const int v = base + static_cast<int>(rng.index(size));
            if (u != v) triples.push_back({name(u), "r", name(v)});
        }
    }
    for (int b = 0; b < bridges; ++b) {
        triples.push_back({name(static_cast<int>(rng.index(size))),
                           "r", name(size + static_cast<int>(rng.index(size)))});
    }
    return build_graph(triples);
}

void check_balance(const Partition& p, std::size_t n) {
    const auto sizes = p.part_sizes();
    const std::size_t cap = p.capacity(n);
    for (const auto size : sizes) CHECK(size <= cap);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == n);
}

}  // namespace

TEST_CASE("path of four splits into the unique balanced min cut") {
    const auto g = build_graph({{"a", "r", "b"}, {"b", "r", "c"}, {"c", "r", "d"}});
    const auto p = partition_kway(g, 2, 0.1, 1);
    check_balance(p, 4);
    CHECK(p.assignment[0] == p.assignment[1]);
    CHECK(p.assignment[2] == p.assignment[3]);
    CHECK(p.assignment[0] != p.assignment[2]);
    CHECK(weighted_cut(to_weighted(g), p.assignment) == 1.0);
}

TEST_CASE("two triangles joined by a bridge cut only the bridge") {
    const auto g = build_graph({{"a", "r", "b"},
                                {"b", "r", "c"},
                                {"c", "r", "a"},
                                {"x", "r", "y"},
                                {"y", "r", "z"},
                                {"z", "r", "x"},
                                {"a", "r", "x"}});
    const auto wg = to_weighted(g);
    const auto p = partition_kway(g, 2, 0.1, 5);
    check_balance(p, 6);
    const double oracle = oracles::min_balanced_2cut(wg, 0.1);
    CHECK(oracle == 1.0);
    CHECK(weighted_cut(wg, p.assignment) == oracle);
}

TEST_CASE("zero-weight edge between two cliques carries the whole cut") {
    // Vertices 0-3 and 4-7 are cliques; the only inter-clique edge has weight 0.
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;
    for (std::uint32_t base : {0u, 4u}) {
        for (std::uint32_t i = 0; i < 4; ++i) {
            for (std::uint32_t j = i + 1; j < 4; ++j) edges.push_back({base + i, base + j, 1.0});
        }
    }
    edges.push_back({0, 4, 0.0});
    const auto wg = weighted_from_edges(8, edges);
    const auto p = partition_kway(wg, 2, 0.1, 3);
    const double oracle = oracles::min_balanced_2cut(wg, 0.1);
    CHECK(oracle == 0.0);
    CHECK(weighted_cut(wg, p.assignment) == 0.0);
    CHECK(p.assignment[0] == p.assignment[1]);
    CHECK(p.assignment[4] == p.assignment[5]);
    CHECK(p.assignment[0] != p.assignment[4]);
}

TEST_CASE("partition_kway rejects K = 0 and K > |E|") {
    const auto g = build_graph({{"a", "r", "b"}});
    CHECK_THROWS_AS(partition_kway(g, 0, 0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(partition_kway(g, 3, 0.1, 0), std::invalid_argument);
}

TEST_CASE("K = 1 assigns everything to part zero") {
    const auto g = two_communities(20, 3, 8);
    const auto p = partition_kway(g, 1, 0.1, 0);
    for (const auto a : p.assignment) CHECK(a == 0);
    CHECK(edge_cut_rate(g, p) == 0.0);
}

TEST_CASE("balance invariant holds across random graphs and K values") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        Rng rng(seed * 977 + 13);
        const int size = 20 + static_cast<int>(rng.index(60));
        const auto g = two_communities(size, 4, seed);
        const int k = 2 + static_cast<int>(rng.index(6));
        const auto p = partition_kway(g, k, 0.1, seed);
        check_balance(p, g.entity_count());
    }
}

TEST_CASE("cut beats the mean of random balanced partitions on planted communities") {
    const auto g = two_communities(60, 4, 21);
    const auto wg = to_weighted(g);
    const auto p = partition_kway(g, 2, 0.1, 2);
    const double cut = weighted_cut(wg, p.assignment);
    Rng rng(99);
    double total = 0.0;
    for (int i = 0; i < 100; ++i) {
        total += oracles::cut_of(wg, oracles::random_balanced_partition(wg.n, 2, rng));
    }
    CHECK(cut <= total / 100.0);
}

TEST_CASE("identical seeds give identical partitions") {
    const auto g = two_communities(40, 6, 4);
    const auto a = partition_kway(g, 4, 0.1, 1234);
    const auto b = partition_kway(g, 4, 0.1, 1234);
    CHECK(a.assignment == b.assignment);
    const auto c = partition_kway(g, 4, 0.1, 1235);
    check_balance(c, g.entity_count());
}

TEST_CASE("zero-weight edges never contribute to the cut objective") {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges = {
        {0, 1, 2.0}, {1, 2, 3.0}, {2, 3, 1.0}, {3, 0, 4.0}};
    auto with_zero = edges;
    with_zero.push_back({0, 2, 0.0});
    with_zero.push_back({1, 3, 0.0});
    const auto g1 = weighted_from_edges(4, edges);
    const auto g2 = weighted_from_edges(4, with_zero);
    const std::vector<std::uint32_t> assign = {0, 1, 0, 1};
    CHECK(weighted_cut(g1, assign) == weighted_cut(g2, assign));
}

TEST_CASE("edge_cut_rate on the path of four") {
    const auto g = build_graph({{"a", "r", "b"}, {"b", "r", "c"}, {"c", "r", "d"}});
    Partition p;
    p.k = 2;
    p.assignment = {0, 0, 1, 1};
    CHECK(edge_cut_rate(g, p) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("edge_cut_rate equals a dense recount oracle on random partitions") {
    const auto g = two_communities(30, 5, 17);
    Rng rng(5);
    Partition p;
    p.k = 3;
    p.assignment.resize(g.entity_count());
    for (auto& a : p.assignment) a = static_cast<std::uint32_t>(rng.index(3));

    const auto dense = oracles::dense_adjacency(g);
    std::size_t total = 0, cut = 0;
    for (EntityId u = 0; u < g.entity_count(); ++u) {
        for (EntityId v = u + 1; v < g.entity_count(); ++v) {
            if (dense[u][v] > 0.0) {
                ++total;
                if (p.assignment[u] != p.assignment[v]) ++cut;
            }
        }
    }
    CHECK(edge_cut_rate(g, p) ==
          doctest::Approx(static_cast<double>(cut) / static_cast<double>(total)));
}

TEST_CASE("edgeless graph has zero edge-cut rate by convention") {
    const auto g = build_graph({{"a", "r", "a"}, {"b", "r", "b"}});
    Partition p;
    p.k = 2;
    p.assignment = {0, 1};
    CHECK(edge_cut_rate(g, p) == 0.0);
    Partition bad;
    bad.k = 2;
    bad.assignment = {0};
    CHECK_THROWS_AS(edge_cut_rate(g, bad), std::invalid_argument);
}
