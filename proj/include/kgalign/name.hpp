#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgalign/embedding.hpp"
#include "kgalign/topk.hpp"
#include "kgalign/types.hpp"

namespace kgalign {

struct NffConfig {
    double gamma_fusion = 0.05;  // string-channel weight in M_n
    double theta = 0.5;          // Jaccard lower bound for candidate pairs
    int phi = 50;                // semantic top-k per source entity
    double epsilon = 1e-8;       // normalization guard
    int segments = 4;            // segmented semantic search
    int minhash_perms = 128;
    int workers = 0;
};

// Lowercased, punctuation-stripped, whitespace-split tokens.
std::vector<std::string> tokenize_name(const std::string& name);

enum class EmbedderMode { FileBacked, HashingFallback };

// Turns an entity name into a fixed-dimension vector: per-token vectors
// (looked up or derived by character-trigram feature hashing) are max-pooled
// and L2-normalized with an epsilon guard. Empty names map to the zero
// vector with a warning.
class NameEmbedder {
public:
    static NameEmbedder hashing(int dim = 256);
    static NameEmbedder from_token_vectors(std::unordered_map<std::string, Eigen::VectorXd> vectors,
                                           int dim);
    // Token-vector text file: `token<TAB>f1 f2 ... fD` per line.
    static NameEmbedder from_token_file(const std::string& path);

    Eigen::VectorXd embed(const std::string& name) const;
    EmbeddingTable embed_all(const std::vector<std::string>& names) const;

    int dim() const { return dim_; }
    EmbedderMode mode() const { return mode_; }
    double epsilon() const { return epsilon_; }

private:
    NameEmbedder(EmbedderMode mode, int dim) : mode_(mode), dim_(dim) {}

    Eigen::VectorXd token_vector(const std::string& token) const;

    EmbedderMode mode_;
    int dim_;
    double epsilon_ = 1e-8;
    std::unordered_map<std::string, Eigen::VectorXd> token_vectors_;
};

// Exact Manhattan-distance top-phi per source row, computed segment-by-
// segment to bound memory; output is independent of the segment count.
// Distances convert to similarities by global min-max over kept entries.
TopKSimilarityMatrix semantic_topk(const EmbeddingTable& src, const EmbeddingTable& tgt,
                                   const NffConfig& cfg);

// MinHash signatures over the token set of a name: signature[i] is the
// minimum of a seeded universal hash over the tokens.
class MinHasher {
public:
    explicit MinHasher(int perms);

    std::vector<std::uint64_t> signature(const std::string& name) const;
    static double estimate_jaccard(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b);
    int perms() const { return static_cast<int>(mult_.size()); }

private:
    std::vector<std::uint64_t> mult_, add_;
};

// Banding parameters with S-curve threshold (1/bands)^(1/rows) within 0.05
// of theta, chosen to maximize recall at theta + 0.1.
std::pair<int, int> lsh_band_plan(int perms, double theta);  // (bands, rows)

// Banding LSH over MinHash signatures; every emitted pair is verified by
// signature-estimated Jaccard >= theta. Deterministic, deduplicated order.
std::vector<std::pair<EntityId, EntityId>> lsh_candidates(const std::vector<std::string>& src_names,
                                                          const std::vector<std::string>& tgt_names,
                                                          const NffConfig& cfg);

// 1 - editdistance / max length, over unicode code points; both empty -> 1.
double levenshtein_similarity(const std::string& a, const std::string& b);
std::size_t levenshtein_distance(const std::string& a, const std::string& b);

TopKSimilarityMatrix string_similarity_matrix(const std::vector<std::pair<EntityId, EntityId>>& candidates,
                                              const std::vector<std::string>& src_names,
                                              const std::vector<std::string>& tgt_names, int k);

// M_n = M_se + gamma * M_st as a sparse union-add, top-phi per row.
TopKSimilarityMatrix nff_fuse(const TopKSimilarityMatrix& m_se, const TopKSimilarityMatrix& m_st,
                              const NffConfig& cfg);

}  // namespace kgalign
