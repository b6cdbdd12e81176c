#pragma once

#include <cstdint>
#include <utility>

#include "kgalign/kg.hpp"

namespace kgalign {

// Desk-scale bilingual benchmark: a community-structured source graph and a
// noised copy of it, plus the planted ground-truth mapping.
struct SyntheticSpec {
    int entities_per_side = 1000;
    double avg_degree = 6.0;
    int community_count = 10;
    double name_noise = 0.0;       // fraction of target names perturbed
    double structure_noise = 0.0;  // fraction of target edges rewired
    double unknown_entity_ratio = 0.0;
    int min_anchors = 5;  // known neighbors attached to each unknown entity
    std::uint64_t rng_seed = 0;
};

struct SyntheticBenchmark {
    KnowledgeGraph source;
    KnowledgeGraph target;
    SeedAlignment truth;  // kind = GroundTruth, identity over shared entities
};

SyntheticBenchmark generate_synthetic_benchmark(const SyntheticSpec& spec);

// Shuffles truth with rng_seed and splits at `ratio` into (train, test).
std::pair<SeedAlignment, SeedAlignment> split_seed_alignment(const SeedAlignment& truth,
                                                             double ratio,
                                                             std::uint64_t rng_seed);

}  // namespace kgalign
