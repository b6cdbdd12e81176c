#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kgalign/alignment.hpp"
#include "kgalign/gnn.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/minibatch.hpp"
#include "kgalign/name.hpp"
#include "kgalign/topk.hpp"

namespace kgalign {

enum class Strategy { Vps, MetisCps };
enum class Ablation { None, Name, Structure };

struct PipelineConfig {
    // Inputs (file-based entry point).
    std::string source_triples;
    std::string target_triples;
    std::string train_seeds;  // optional in unsupervised mode
    std::string test_truth;
    std::string token_vectors;        // file-backed token embedder
    std::string source_name_embeddings;  // per-entity checkpoint + .labels sidecar
    std::string target_name_embeddings;
    std::string out_dir;

    Strategy strategy = Strategy::MetisCps;
    int k = 5;
    double seed_ratio = 0.2;
    bool unsupervised = false;
    Ablation ablation = Ablation::None;
    std::uint64_t rng_seed = 0;
    int workers = 0;
    int hash_dim = 256;  // hashing-fallback embedder width
    bool save_matrices = false;

    CpsConfig cps;
    OverlapConfig overlap;
    GnnConfig gnn;
    TripletConfig triplet;
    NffConfig nff;
};

struct PipelineResult {
    AlignmentMapping mapping;
    EvaluationReport report;  // fused channel, with partition metrics attached
    EvaluationReport structure_report;
    EvaluationReport name_report;

    TopKSimilarityMatrix fused;
    TopKSimilarityMatrix m_s;
    TopKSimilarityMatrix m_n;

    SeedAlignment pseudo_seeds;
    std::optional<double> augmentation_precision;
    double colocation_train = 0.0;
    double colocation_test = 0.0;
    double colocation_total = 0.0;
    double edge_cut_source = 0.0;
    double edge_cut_target = 0.0;

    std::vector<MiniBatch> batches;  // as trained (after overlap expansion)
};

// End-to-end run on in-memory graphs; stages follow the structure-channel
// recipe (augment, partition, per-batch training) plus the name channel and
// channel fusion. Deterministic for fixed config + rng_seed.
PipelineResult run_pipeline(const KnowledgeGraph& g_s, const KnowledgeGraph& g_t,
                            const SeedAlignment& train, const SeedAlignment& test,
                            const PipelineConfig& cfg);

// File-based entry: loads inputs, runs, writes alignment/report/assignment
// (and matrices when requested) into cfg.out_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

std::vector<std::pair<std::string, std::string>> report_fields(const PipelineConfig& cfg,
                                                               const PipelineResult& result);

// Stage seeds, exposed so bypass-style tests can reproduce pipeline stages.
enum class PipelineStage : std::uint64_t { Partition = 1, Train = 2 };
std::uint64_t pipeline_stage_seed(std::uint64_t rng_seed, PipelineStage stage, std::uint64_t salt = 0);

}  // namespace kgalign
