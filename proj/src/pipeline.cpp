#include "kgalign/pipeline.hpp"

#include <filesystem>
#include <stdexcept>
#include <unordered_map>

#include "kgalign/embedding.hpp"
#include "kgalign/parallel.hpp"
#include "kgalign/partition.hpp"

namespace kgalign {

namespace {

template <class Fn>
auto with_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("[") + stage + "] " + e.what());
    }
}

EmbeddingTable entity_embeddings_from_file(const std::string& path, const KnowledgeGraph& g) {
    auto [table, labels] = load_embeddings(path);
    if (labels.empty()) {
        throw std::runtime_error("entity embedding checkpoint lacks a .labels sidecar: " + path);
    }
    std::unordered_map<std::string, std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) rows.emplace(labels[i], i);
    EmbeddingTable out(g.entity_count(), table.dim());
    for (EntityId e = 0; e < g.entity_count(); ++e) {
        auto it = rows.find(g.entities.label(e));
        if (it == rows.end()) {
            throw std::runtime_error("no embedding for entity '" + g.entities.label(e) + "' in " + path);
        }
        out.vectors.row(e) = table.vectors.row(static_cast<Eigen::Index>(it->second));
    }
    return out;
}

Partition partition_from_batches(const std::vector<MiniBatch>& batches, std::size_t n, bool source) {
    Partition p;
    p.k = static_cast<int>(batches.size());
    p.assignment.assign(n, 0);
    for (const auto& b : batches) {
        const auto& entities = source ? b.source.entities : b.target.entities;
        for (const EntityId e : entities) p.assignment[e] = static_cast<std::uint32_t>(b.index);
    }
    return p;
}

const char* strategy_name(Strategy s) { return s == Strategy::Vps ? "vps" : "metis-cps"; }

const char* ablation_name(Ablation a) {
    switch (a) {
        case Ablation::Name: return "name";
        case Ablation::Structure: return "structure";
        default: return "none";
    }
}

}  // namespace

std::uint64_t pipeline_stage_seed(std::uint64_t rng_seed, PipelineStage stage, std::uint64_t salt) {
    return derive_seed(rng_seed, static_cast<std::uint64_t>(stage), salt);
}

PipelineResult run_pipeline(const KnowledgeGraph& g_s, const KnowledgeGraph& g_t,
                            const SeedAlignment& train, const SeedAlignment& test,
                            const PipelineConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("pipeline: K must be >= 1");
    PipelineResult result;

    NffConfig nff = cfg.nff;
    nff.workers = cfg.workers;

    const auto& src_names = g_s.entities.labels();
    const auto& tgt_names = g_t.entities.labels();

    // Name channel: M_n = M_se + gamma * M_st over the full entity sets.
    result.m_n = with_stage("name-channel", [&] {
        EmbeddingTable src_emb, tgt_emb;
        if (!cfg.source_name_embeddings.empty() || !cfg.target_name_embeddings.empty()) {
            if (cfg.source_name_embeddings.empty() || cfg.target_name_embeddings.empty()) {
                throw std::invalid_argument("both entity embedding files are required");
            }
            src_emb = entity_embeddings_from_file(cfg.source_name_embeddings, g_s);
            tgt_emb = entity_embeddings_from_file(cfg.target_name_embeddings, g_t);
        } else {
            const NameEmbedder embedder = cfg.token_vectors.empty()
                                              ? NameEmbedder::hashing(cfg.hash_dim)
                                              : NameEmbedder::from_token_file(cfg.token_vectors);
            src_emb = embedder.embed_all(src_names);
            tgt_emb = embedder.embed_all(tgt_names);
        }
        const TopKSimilarityMatrix m_se = semantic_topk(src_emb, tgt_emb, nff);
        const auto candidates = lsh_candidates(src_names, tgt_names, nff);
        const TopKSimilarityMatrix m_st =
            string_similarity_matrix(candidates, src_names, tgt_names, nff.phi);
        return nff_fuse(m_se, m_st, nff);
    });

    // Name-based data augmentation; provided train seeds win on conflict.
    const SeedAlignment empty_train{{}, SeedKind::TrainSeed};
    const SeedAlignment& given = cfg.unsupervised ? empty_train : train;
    SeedAlignment combined = with_stage("augment", [&] {
        result.pseudo_seeds = augment_seeds(result.m_n, given);
        return merge_seed_alignments(given, result.pseudo_seeds, SeedKind::TrainSeed);
    });

    {
        SeedAlignment truth_all = train;
        truth_all.kind = SeedKind::GroundTruth;
        for (const auto& pair : test.pairs) truth_all.pairs.push_back(pair);
        if (!result.pseudo_seeds.empty() && !truth_all.empty()) {
            result.augmentation_precision = augmentation_precision(result.pseudo_seeds, truth_all);
        }
    }

    // Mini-batch generation.
    std::vector<MiniBatch> batches = with_stage("partition", [&] {
        const std::uint64_t seed = pipeline_stage_seed(cfg.rng_seed, PipelineStage::Partition);
        if (cfg.strategy == Strategy::Vps) return vps(g_s, g_t, combined, cfg.k, seed);
        CpsConfig cps = cfg.cps;
        cps.k = cfg.k;
        return metis_cps(g_s, g_t, combined, cps, seed);
    });

    {
        const Partition ps = partition_from_batches(batches, g_s.entity_count(), true);
        const Partition pt = partition_from_batches(batches, g_t.entity_count(), false);
        result.edge_cut_source = edge_cut_rate(g_s, ps);
        result.edge_cut_target = edge_cut_rate(g_t, pt);
    }

    if (cfg.overlap.d_ov > 1) {
        batches = with_stage("overlap", [&] { return expand_overlap(batches, combined, cfg.overlap); });
    }
    if (!train.empty()) result.colocation_train = seed_colocation_rate(batches, train);
    if (!test.empty()) result.colocation_test = seed_colocation_rate(batches, test);
    {
        SeedAlignment all;
        all.pairs = train.pairs;
        all.pairs.insert(all.pairs.end(), test.pairs.begin(), test.pairs.end());
        if (!all.empty()) result.colocation_total = seed_colocation_rate(batches, all);
    }

    // Structure channel: independent per-batch training.
    result.m_s = with_stage("train", [&] {
        if (cfg.ablation == Ablation::Structure) {
            return TopKSimilarityMatrix(g_s.entity_count(), g_t.entity_count(), nff.phi);
        }
        std::vector<EmbeddingTable> embeddings(batches.size());
        parallel_for(batches.size(), resolve_workers(cfg.workers),
                     [&](std::size_t begin, std::size_t end) {
                         for (std::size_t i = begin; i < end; ++i) {
                             embeddings[i] = train_batch(
                                 batches[i], cfg.gnn, cfg.triplet,
                                 pipeline_stage_seed(cfg.rng_seed, PipelineStage::Train, i));
                         }
                     });
        TopKSimilarityMatrix m = structure_similarity(batches, embeddings, nff.phi,
                                                      g_s.entity_count(), g_t.entity_count());
        verify_block_diagonal(m, batches);
        return m;
    });

    // Channel fusion and evaluation.
    result.fused = with_stage("fuse", [&] {
        switch (cfg.ablation) {
            case Ablation::Name: return result.m_s;
            case Ablation::Structure: return result.m_n;
            default: return fuse_channels(result.m_s, result.m_n);
        }
    });
    with_stage("eval", [&] {
        result.mapping = result.fused.empty() ? AlignmentMapping{} : infer_alignment(result.fused);
        result.report = evaluate(result.fused, test);
        if (!result.m_s.empty()) result.structure_report = evaluate(result.m_s, test);
        result.name_report = evaluate(result.m_n, test);
        result.report.co_location_rate = result.colocation_test;
        result.report.edge_cut_rate = 0.5 * (result.edge_cut_source + result.edge_cut_target);
        return 0;
    });

    result.batches = std::move(batches);
    return result;
}

std::vector<std::pair<std::string, std::string>> report_fields(const PipelineConfig& cfg,
                                                               const PipelineResult& result) {
    std::vector<std::pair<std::string, std::string>> fields;
    auto add = [&](const std::string& key, const std::string& value) {
        fields.emplace_back(key, value);
    };
    auto add_report = [&](const std::string& prefix, const EvaluationReport& report) {
        for (const auto& [n, hits] : report.hits_at) {
            add(prefix + "hits@" + std::to_string(n), format_metric(hits));
        }
        add(prefix + "mrr", format_metric(report.mrr));
    };
    add_report("", result.report);
    add_report("structure_", result.structure_report);
    add_report("name_", result.name_report);
    add("evaluated_pairs", std::to_string(result.report.evaluated_pairs));
    add("pseudo_seeds", std::to_string(result.pseudo_seeds.size()));
    if (result.augmentation_precision) {
        add("augmentation_precision", format_metric(*result.augmentation_precision));
    }
    add("colocation_train", format_metric(result.colocation_train));
    add("colocation_test", format_metric(result.colocation_test));
    add("colocation_total", format_metric(result.colocation_total));
    add("edge_cut_source", format_metric(result.edge_cut_source));
    add("edge_cut_target", format_metric(result.edge_cut_target));
    add("strategy", strategy_name(cfg.strategy));
    add("ablation", ablation_name(cfg.ablation));
    add("k", std::to_string(cfg.k));
    add("d_ov", std::to_string(cfg.overlap.d_ov));
    add("rng_seed", std::to_string(cfg.rng_seed));
    return fields;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    const KnowledgeGraph g_s = with_stage("load", [&] { return load_graph(cfg.source_triples); });
    const KnowledgeGraph g_t = with_stage("load", [&] { return load_graph(cfg.target_triples); });
    SeedAlignment train{{}, SeedKind::TrainSeed};
    if (!cfg.train_seeds.empty()) {
        train = with_stage("load", [&] {
            return load_seed_file(cfg.train_seeds, g_s, g_t, SeedKind::TrainSeed);
        });
    } else if (!cfg.unsupervised) {
        throw std::runtime_error("[load] train seeds required unless --unsupervised");
    }
    if (cfg.test_truth.empty()) throw std::runtime_error("[load] test truth path required");
    const SeedAlignment test = with_stage("load", [&] {
        return load_seed_file(cfg.test_truth, g_s, g_t, SeedKind::GroundTruth);
    });

    PipelineResult result = run_pipeline(g_s, g_t, train, test, cfg);

    if (!cfg.out_dir.empty()) {
        with_stage("write", [&] {
            namespace fs = std::filesystem;
            fs::create_directories(cfg.out_dir);
            const fs::path dir(cfg.out_dir);
            save_alignment((dir / "alignment.tsv").string(), result.mapping, g_s, g_t);
            save_report((dir / "report.txt").string(), report_fields(cfg, result));
            save_batch_assignment((dir / "batch_assignment.tsv").string(), result.batches, g_s, g_t);
            save_seed_file((dir / "pseudo_seeds.tsv").string(), result.pseudo_seeds, g_s, g_t);
            if (cfg.save_matrices) {
                result.m_s.save((dir / "m_s.txt").string());
                result.m_n.save((dir / "m_n.txt").string());
                result.fused.save((dir / "m_fused.txt").string());
            }
            return 0;
        });
    }
    return result;
}

}  // namespace kgalign
