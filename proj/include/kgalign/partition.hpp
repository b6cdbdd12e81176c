#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "kgalign/kg.hpp"
#include "kgalign/types.hpp"

namespace kgalign {

// Undirected weighted graph in CSR form, the partitioner's working
// representation. Vertex weights track how many original vertices a coarse
// vertex represents.
struct WeightedGraph {
    std::uint32_t n = 0;
    std::vector<std::size_t> xadj;   // size n+1
    std::vector<std::uint32_t> adj;  // neighbor ids
    std::vector<double> wgt;         // edge weights, parallel to adj
    std::vector<std::uint32_t> vwgt; // vertex weights

    std::size_t degree(std::uint32_t v) const { return xadj[v + 1] - xadj[v]; }
};

WeightedGraph to_weighted(const KnowledgeGraph& g);

// Builds from an undirected edge list (u, v, w); parallel edges sum.
WeightedGraph weighted_from_edges(std::uint32_t n,
                                  const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges);

struct Partition {
    std::vector<std::uint32_t> assignment;  // per-entity part id in 0..k-1
    int k = 0;
    double imbalance = 0.1;

    std::vector<std::size_t> part_sizes() const;
    // Max allowed part size for n vertices: (1 + imbalance) * ceil(n / k).
    std::size_t capacity(std::size_t n) const;
};

// Multilevel k-way partitioning minimizing weighted edge-cut under the
// balance constraint: heavy-edge-matching coarsening, seeded region-growing
// initial assignment, boundary single-vertex refinement on uncoarsening.
// Deterministic for a fixed rng_seed.
Partition partition_kway(const WeightedGraph& g, int k, double imbalance, std::uint64_t rng_seed);
Partition partition_kway(const KnowledgeGraph& g, int k, double imbalance, std::uint64_t rng_seed);

// Max allowed part size: (1 + imbalance) * ceil(n / k).
std::size_t part_capacity(std::size_t n, int k, double imbalance);

// Sum of weights of edges whose endpoints lie in different parts.
double weighted_cut(const WeightedGraph& g, const std::vector<std::uint32_t>& assignment);

// Fraction of (unweighted, original) adjacency edges cut by the partition.
double edge_cut_rate(const KnowledgeGraph& g, const Partition& p);

}  // namespace kgalign
