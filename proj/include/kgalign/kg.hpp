#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgalign/types.hpp"

namespace kgalign {

// Interned label table: label <-> dense id in first-appearance order.
class IdTable {
public:
    std::uint32_t intern(std::string_view label);
    std::optional<std::uint32_t> find(std::string_view label) const;
    const std::string& label(std::uint32_t id) const;
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct AdjEdge {
    EntityId neighbor = 0;
    RelationId relation = 0;  // relation of the first triple that created the edge
    double weight = 0.0;
};

struct LabeledTriple {
    std::string head;
    std::string relation;
    std::string tail;
};

// In-memory knowledge graph. Immutable after construction. The triple list
// keeps directed triples verbatim (minus exact duplicates); the adjacency is
// an undirected weighted simple-graph view where parallel triples between the
// same entity pair collapse into one edge with summed weight and self-loops
// are dropped.
class KnowledgeGraph {
public:
    std::size_t entity_count() const { return entities.size(); }
    std::size_t relation_count() const { return relations.size(); }
    std::size_t triple_count() const { return triples.size(); }

    // Undirected adjacency of e, ascending neighbor id.
    std::vector<std::pair<EntityId, double>> neighbors(EntityId e) const;

    const std::vector<AdjEdge>& adjacency_row(EntityId e) const;

    // Number of distinct undirected adjacency edges (self-loops excluded).
    std::size_t undirected_edge_count() const;

    IdTable entities;
    IdTable relations;
    std::vector<Triple> triples;
    std::vector<std::vector<AdjEdge>> adjacency;
};

KnowledgeGraph build_graph(const std::vector<LabeledTriple>& triples);

enum class SeedKind { TrainSeed, PseudoSeed, GroundTruth };

// Ordered list of (source-entity, target-entity) pairs. 1-to-1: no endpoint
// repeats within one alignment.
struct SeedAlignment {
    std::vector<std::pair<EntityId, EntityId>> pairs;
    SeedKind kind = SeedKind::TrainSeed;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

// Validates the 1-to-1 invariant; throws std::invalid_argument on violation.
SeedAlignment make_seed_alignment(std::vector<std::pair<EntityId, EntityId>> pairs, SeedKind kind);

// Validates ids against the two graphs in addition to the 1-to-1 invariant.
void validate_seed_alignment(const SeedAlignment& seeds, const KnowledgeGraph& source,
                             const KnowledgeGraph& target);

// Union with priority to `base` (pairs of `extra` conflicting with a base
// endpoint are dropped).
SeedAlignment merge_seed_alignments(const SeedAlignment& base, const SeedAlignment& extra,
                                    SeedKind kind);

struct AlignmentMapping {
    struct Match {
        EntityId source = 0;
        EntityId target = 0;
        double score = 0.0;
    };
    std::vector<Match> matches;  // each source appears at most once
};

// --- file formats -----------------------------------------------------------
// Triples file: one `head<TAB>relation<TAB>tail` per line, '#' comments.
// Seed file: `source_label<TAB>target_label` per line.

std::vector<LabeledTriple> load_triples_file(const std::string& path);
KnowledgeGraph load_graph(const std::string& path);
void save_triples_file(const std::string& path, const KnowledgeGraph& g);

SeedAlignment load_seed_file(const std::string& path, const KnowledgeGraph& source,
                             const KnowledgeGraph& target, SeedKind kind);
void save_seed_file(const std::string& path, const SeedAlignment& seeds,
                    const KnowledgeGraph& source, const KnowledgeGraph& target);

}  // namespace kgalign
