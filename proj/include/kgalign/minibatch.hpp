#pragma once

#include <string>
#include <vector>

#include "kgalign/kg.hpp"
#include "kgalign/partition.hpp"
#include "kgalign/types.hpp"

namespace kgalign {

// Induced subgraph referenced by global entity ids.
struct Subgraph {
    std::vector<EntityId> entities;  // sorted ascending
    std::vector<Triple> triples;     // both endpoints inside `entities`
};

Subgraph induce_subgraph(const KnowledgeGraph& g, const std::vector<EntityId>& entities);

// A paired (source-subgraph, target-subgraph) training unit.
struct MiniBatch {
    int index = 0;
    Subgraph source;
    Subgraph target;
    SeedAlignment local_seeds;  // pairs with both endpoints inside the batch
};

struct CpsConfig {
    int k = 5;
    double w_prime = 1000.0;  // connected-graph edge weight, >> 1
    int q = 1;                // hub entities per connected graph
    double imbalance = 0.1;
};

struct OverlapConfig {
    int d_ov = 1;  // number of most-similar mini-batches merged per batch
};

// Vanilla partition strategy: seed pairs round-robin over K batches, the
// remaining entities of each graph assigned uniformly at random.
std::vector<MiniBatch> vps(const KnowledgeGraph& g_s, const KnowledgeGraph& g_t,
                           const SeedAlignment& seeds, int k, std::uint64_t rng_seed);

// Collaborative partition strategy: partition the source graph, re-weight the
// target graph (connected-graph edges raised to w', seed-conflicting edges
// zeroed), partition it, then pair parts by greedy maximum seed overlap.
std::vector<MiniBatch> metis_cps(const KnowledgeGraph& g_s, const KnowledgeGraph& g_t,
                                 const SeedAlignment& seeds, const CpsConfig& cfg,
                                 std::uint64_t rng_seed);

// The partitioning view used by metis_cps's target-side partitioning call;
// virtual edges exist here only, never in returned subgraphs.
WeightedGraph cps_reweight_target(const KnowledgeGraph& g_t, const SeedAlignment& seeds,
                                  const Partition& source_parts, const CpsConfig& cfg,
                                  std::uint64_t rng_seed);

// Replaces each batch with the union of itself and its (d_ov - 1) most
// similar other batches; similarity counts seed pairs bridging A's source
// side and B's target side. d_ov = 1 is the identity.
std::vector<MiniBatch> expand_overlap(const std::vector<MiniBatch>& batches,
                                      const SeedAlignment& seeds, const OverlapConfig& cfg);

// Fraction of truth pairs with both endpoints inside one batch.
double seed_colocation_rate(const std::vector<MiniBatch>& batches, const SeedAlignment& truth);

// Batch assignment file: `entity_label<TAB>S|T<TAB>batch_index`.
void save_batch_assignment(const std::string& path, const std::vector<MiniBatch>& batches,
                           const KnowledgeGraph& g_s, const KnowledgeGraph& g_t);
std::vector<MiniBatch> load_batch_assignment(const std::string& path, const KnowledgeGraph& g_s,
                                             const KnowledgeGraph& g_t, const SeedAlignment& seeds);

}  // namespace kgalign
