#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "kgalign/alignment.hpp"
#include "kgalign/embedding.hpp"
#include "kgalign/gnn.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/minibatch.hpp"
#include "kgalign/name.hpp"
#include "kgalign/parallel.hpp"
#include "kgalign/partition.hpp"
#include "kgalign/pipeline.hpp"
#include "kgalign/synthetic.hpp"
#include "kgalign/topk.hpp"

namespace {

namespace fs = std::filesystem;
using namespace kgalign;

struct GenBenchArgs {
    std::string out_dir;
    SyntheticSpec spec;
    double seed_ratio = 0.2;
};

int run_gen_bench(const GenBenchArgs& args) {
    const SyntheticBenchmark bench = generate_synthetic_benchmark(args.spec);
    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    save_triples_file((dir / "source_triples.tsv").string(), bench.source);
    save_triples_file((dir / "target_triples.tsv").string(), bench.target);
    save_seed_file((dir / "truth_all.tsv").string(), bench.truth, bench.source, bench.target);
    const auto [train, test] =
        split_seed_alignment(bench.truth, args.seed_ratio, derive_seed(args.spec.rng_seed, 11));
    save_seed_file((dir / "train_seeds.tsv").string(), train, bench.source, bench.target);
    save_seed_file((dir / "test_truth.tsv").string(), test, bench.source, bench.target);
    std::cout << "entities " << bench.source.entity_count() << "+" << bench.target.entity_count()
              << " triples " << bench.source.triple_count() << "+" << bench.target.triple_count()
              << " truth " << bench.truth.size() << " train " << train.size() << " test "
              << test.size() << '\n';
    return 0;
}

struct PartitionArgs {
    std::string source, target, seeds, truth, out, report;
    std::string strategy = "metis-cps";
    CpsConfig cps;
    int d_ov = 1;
    std::uint64_t seed = 0;
};

int run_partition(const PartitionArgs& args) {
    const KnowledgeGraph g_s = load_graph(args.source);
    const KnowledgeGraph g_t = load_graph(args.target);
    const SeedAlignment seeds = load_seed_file(args.seeds, g_s, g_t, SeedKind::TrainSeed);

    std::vector<MiniBatch> batches;
    if (args.strategy == "vps") {
        batches = vps(g_s, g_t, seeds, args.cps.k, args.seed);
    } else if (args.strategy == "metis-cps") {
        batches = metis_cps(g_s, g_t, seeds, args.cps, args.seed);
    } else {
        throw std::runtime_error("[partition] unknown strategy: " + args.strategy);
    }
    if (args.d_ov > 1) batches = expand_overlap(batches, seeds, OverlapConfig{args.d_ov});
    save_batch_assignment(args.out, batches, g_s, g_t);

    std::vector<std::pair<std::string, std::string>> fields;
    fields.emplace_back("strategy", args.strategy);
    fields.emplace_back("k", std::to_string(args.cps.k));
    fields.emplace_back("colocation_seeds", format_metric(seed_colocation_rate(batches, seeds)));
    if (!args.truth.empty()) {
        const SeedAlignment truth = load_seed_file(args.truth, g_s, g_t, SeedKind::GroundTruth);
        fields.emplace_back("colocation_truth", format_metric(seed_colocation_rate(batches, truth)));
    }
    if (args.d_ov == 1) {
        Partition ps{std::vector<std::uint32_t>(g_s.entity_count(), 0),
                     static_cast<int>(batches.size()), args.cps.imbalance};
        Partition pt{std::vector<std::uint32_t>(g_t.entity_count(), 0),
                     static_cast<int>(batches.size()), args.cps.imbalance};
        for (const auto& b : batches) {
            for (const EntityId e : b.source.entities) {
                ps.assignment[e] = static_cast<std::uint32_t>(b.index);
            }
            for (const EntityId e : b.target.entities) {
                pt.assignment[e] = static_cast<std::uint32_t>(b.index);
            }
        }
        fields.emplace_back("edge_cut_source", format_metric(edge_cut_rate(g_s, ps)));
        fields.emplace_back("edge_cut_target", format_metric(edge_cut_rate(g_t, pt)));
    }
    for (const auto& [key, value] : fields) std::cout << key << " = " << value << '\n';
    if (!args.report.empty()) save_report(args.report, fields);
    return 0;
}

struct NameSimArgs {
    std::string source, target, out;
    std::string embedder = "hash";
    std::string token_vectors, src_emb, tgt_emb;
    NffConfig nff;
    int hash_dim = 256;
};

int run_name_sim(const NameSimArgs& args) {
    const KnowledgeGraph g_s = load_graph(args.source);
    const KnowledgeGraph g_t = load_graph(args.target);

    EmbeddingTable src_emb, tgt_emb;
    if (args.embedder == "file" && !args.src_emb.empty()) {
        auto [table_s, labels_s] = load_embeddings(args.src_emb);
        auto [table_t, labels_t] = load_embeddings(args.tgt_emb);
        (void)labels_s;
        (void)labels_t;
        src_emb = std::move(table_s);
        tgt_emb = std::move(table_t);
        if (src_emb.size() != g_s.entity_count() || tgt_emb.size() != g_t.entity_count()) {
            throw std::runtime_error("[name-sim] embedding row count does not match graph");
        }
    } else {
        NameEmbedder embedder = args.embedder == "file"
                                    ? NameEmbedder::from_token_file(args.token_vectors)
                                    : NameEmbedder::hashing(args.hash_dim);
        src_emb = embedder.embed_all(g_s.entities.labels());
        tgt_emb = embedder.embed_all(g_t.entities.labels());
    }
    const TopKSimilarityMatrix m_se = semantic_topk(src_emb, tgt_emb, args.nff);
    const auto candidates = lsh_candidates(g_s.entities.labels(), g_t.entities.labels(), args.nff);
    const TopKSimilarityMatrix m_st =
        string_similarity_matrix(candidates, g_s.entities.labels(), g_t.entities.labels(), args.nff.phi);
    const TopKSimilarityMatrix m_n = nff_fuse(m_se, m_st, args.nff);
    m_n.save(args.out);
    std::cout << "candidates " << candidates.size() << " entries " << m_n.entry_count() << '\n';
    return 0;
}

struct AugmentArgs {
    std::string matrix, source, target, seeds, truth, out;
};

int run_augment(const AugmentArgs& args) {
    const KnowledgeGraph g_s = load_graph(args.source);
    const KnowledgeGraph g_t = load_graph(args.target);
    const TopKSimilarityMatrix m_n = TopKSimilarityMatrix::load(args.matrix);
    SeedAlignment existing{{}, SeedKind::TrainSeed};
    if (!args.seeds.empty()) existing = load_seed_file(args.seeds, g_s, g_t, SeedKind::TrainSeed);
    const SeedAlignment pseudo = augment_seeds(m_n, existing);
    save_seed_file(args.out, pseudo, g_s, g_t);
    std::cout << "pseudo_seeds = " << pseudo.size() << '\n';
    if (!args.truth.empty() && !pseudo.empty()) {
        const SeedAlignment truth = load_seed_file(args.truth, g_s, g_t, SeedKind::GroundTruth);
        std::cout << "augmentation_precision = "
                  << format_metric(augmentation_precision(pseudo, truth)) << '\n';
    }
    return 0;
}

struct TrainArgs {
    std::string source, target, assignment, out, emb_out;
    std::vector<std::string> seeds;
    GnnConfig gnn;
    TripletConfig triplet;
    int phi = 50;
    std::uint64_t seed = 0;
    int workers = 0;
};

int run_train(const TrainArgs& args) {
    const KnowledgeGraph g_s = load_graph(args.source);
    const KnowledgeGraph g_t = load_graph(args.target);
    SeedAlignment seeds{{}, SeedKind::TrainSeed};
    for (const auto& path : args.seeds) {
        const SeedAlignment extra = load_seed_file(path, g_s, g_t, SeedKind::TrainSeed);
        seeds = merge_seed_alignments(seeds, extra, SeedKind::TrainSeed);
    }
    const std::vector<MiniBatch> batches = load_batch_assignment(args.assignment, g_s, g_t, seeds);

    std::vector<EmbeddingTable> embeddings(batches.size());
    parallel_for(batches.size(), resolve_workers(args.workers),
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t i = begin; i < end; ++i) {
                         embeddings[i] = train_batch(batches[i], args.gnn, args.triplet,
                                                     derive_seed(args.seed, 2, i));
                     }
                 });
    const TopKSimilarityMatrix m_s =
        structure_similarity(batches, embeddings, args.phi, g_s.entity_count(), g_t.entity_count());
    verify_block_diagonal(m_s, batches);
    m_s.save(args.out);
    std::cout << "batches " << batches.size() << " entries " << m_s.entry_count() << '\n';

    if (!args.emb_out.empty()) {
        fs::create_directories(args.emb_out);
        for (std::size_t i = 0; i < batches.size(); ++i) {
            std::vector<std::string> labels;
            for (const EntityId e : batches[i].source.entities) {
                labels.push_back("S:" + g_s.entities.label(e));
            }
            for (const EntityId e : batches[i].target.entities) {
                labels.push_back("T:" + g_t.entities.label(e));
            }
            save_embeddings((fs::path(args.emb_out) / ("batch" + std::to_string(i) + ".emb")).string(),
                            embeddings[i], labels);
        }
    }
    return 0;
}

struct FuseArgs {
    std::string structure, name, out;
};

int run_fuse(const FuseArgs& args) {
    const TopKSimilarityMatrix m_s = TopKSimilarityMatrix::load(args.structure);
    const TopKSimilarityMatrix m_n = TopKSimilarityMatrix::load(args.name);
    const TopKSimilarityMatrix fused = fuse_channels(m_s, m_n);
    fused.save(args.out);
    std::cout << "entries " << fused.entry_count() << '\n';
    return 0;
}

struct EvalArgs {
    std::string matrix, source, target, truth, out;
    std::vector<int> ns = {1, 5};
};

int run_eval(const EvalArgs& args) {
    const KnowledgeGraph g_s = load_graph(args.source);
    const KnowledgeGraph g_t = load_graph(args.target);
    const TopKSimilarityMatrix m = TopKSimilarityMatrix::load(args.matrix);
    const SeedAlignment truth = load_seed_file(args.truth, g_s, g_t, SeedKind::GroundTruth);
    const EvaluationReport report = evaluate(m, truth, args.ns);
    std::vector<std::pair<std::string, std::string>> fields;
    for (const auto& [n, hits] : report.hits_at) {
        fields.emplace_back("hits@" + std::to_string(n), format_metric(hits));
    }
    fields.emplace_back("mrr", format_metric(report.mrr));
    fields.emplace_back("evaluated_pairs", std::to_string(report.evaluated_pairs));
    for (const auto& [key, value] : fields) std::cout << key << " = " << value << '\n';
    if (!args.out.empty()) save_report(args.out, fields);
    return 0;
}

int run_run(const PipelineConfig& cfg) {
    const PipelineResult result = run_pipeline(cfg);
    for (const auto& [key, value] : report_fields(cfg, result)) {
        std::cout << key << " = " << value << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph entity alignment toolkit"};
    app.require_subcommand(1);

    GenBenchArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-bench", "generate a synthetic bilingual benchmark");
    cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();
    cmd_gen->add_option("--entities", gen.spec.entities_per_side, "entities per side");
    cmd_gen->add_option("--avg-degree", gen.spec.avg_degree, "average entity degree");
    cmd_gen->add_option("--communities", gen.spec.community_count, "community count");
    cmd_gen->add_option("--name-noise", gen.spec.name_noise, "fraction of perturbed target names");
    cmd_gen->add_option("--structure-noise", gen.spec.structure_noise, "fraction of rewired edges");
    cmd_gen->add_option("--unknown-ratio", gen.spec.unknown_entity_ratio, "unknown entity ratio");
    cmd_gen->add_option("--min-anchors", gen.spec.min_anchors, "anchors per unknown entity");
    cmd_gen->add_option("--seed-ratio", gen.seed_ratio, "train split ratio");
    cmd_gen->add_option("--seed", gen.spec.rng_seed, "rng seed");

    PartitionArgs part;
    auto* cmd_part = app.add_subcommand("partition", "generate mini-batches");
    cmd_part->add_option("--source", part.source, "source triples file")->required();
    cmd_part->add_option("--target", part.target, "target triples file")->required();
    cmd_part->add_option("--seeds", part.seeds, "seed alignment file")->required();
    cmd_part->add_option("--strategy", part.strategy, "vps | metis-cps");
    cmd_part->add_option("--k", part.cps.k, "mini-batch count");
    cmd_part->add_option("--w-prime", part.cps.w_prime, "connected-graph edge weight");
    cmd_part->add_option("--q", part.cps.q, "hubs per connected graph");
    cmd_part->add_option("--d-ov", part.d_ov, "overlap degree");
    cmd_part->add_option("--imbalance", part.cps.imbalance, "balance tolerance");
    cmd_part->add_option("--seed", part.seed, "rng seed");
    cmd_part->add_option("--truth", part.truth, "ground truth for co-location metrics");
    cmd_part->add_option("--out", part.out, "batch assignment output")->required();
    cmd_part->add_option("--report", part.report, "metrics report output");

    NameSimArgs name;
    auto* cmd_name = app.add_subcommand("name-sim", "compute the fused name similarity matrix");
    cmd_name->add_option("--source", name.source, "source triples file")->required();
    cmd_name->add_option("--target", name.target, "target triples file")->required();
    cmd_name->add_option("--embedder", name.embedder, "file | hash");
    cmd_name->add_option("--token-vectors", name.token_vectors, "token vector text file");
    cmd_name->add_option("--src-name-emb", name.src_emb, "source entity embedding checkpoint");
    cmd_name->add_option("--tgt-name-emb", name.tgt_emb, "target entity embedding checkpoint");
    cmd_name->add_option("--theta", name.nff.theta, "Jaccard lower bound");
    cmd_name->add_option("--phi", name.nff.phi, "semantic top-k per source entity");
    cmd_name->add_option("--gamma-fusion", name.nff.gamma_fusion, "string channel weight");
    cmd_name->add_option("--segments", name.nff.segments, "segments for semantic search");
    cmd_name->add_option("--minhash-perms", name.nff.minhash_perms, "MinHash permutations");
    cmd_name->add_option("--hash-dim", name.hash_dim, "hashing embedder width");
    cmd_name->add_option("--workers", name.nff.workers, "worker threads");
    cmd_name->add_option("--out", name.out, "matrix output")->required();

    AugmentArgs aug;
    auto* cmd_aug = app.add_subcommand("augment", "mutual-argmax pseudo seed generation");
    cmd_aug->add_option("--matrix", aug.matrix, "name similarity matrix")->required();
    cmd_aug->add_option("--source", aug.source, "source triples file")->required();
    cmd_aug->add_option("--target", aug.target, "target triples file")->required();
    cmd_aug->add_option("--seeds", aug.seeds, "existing seed alignment");
    cmd_aug->add_option("--truth", aug.truth, "ground truth (prints precision)");
    cmd_aug->add_option("--out", aug.out, "pseudo seed output")->required();

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "per-batch structural embedding training");
    cmd_train->add_option("--source", train.source, "source triples file")->required();
    cmd_train->add_option("--target", train.target, "target triples file")->required();
    cmd_train->add_option("--assignment", train.assignment, "batch assignment file")->required();
    cmd_train->add_option("--seeds", train.seeds, "seed files (repeatable, merged)")->required();
    cmd_train->add_option("--dim", train.gnn.dim, "embedding dimension");
    cmd_train->add_option("--layers", train.gnn.layers, "GNN layers");
    cmd_train->add_option("--epochs", train.triplet.epochs, "training epochs per batch");
    cmd_train->add_option("--lr", train.triplet.learning_rate, "learning rate");
    cmd_train->add_option("--margin", train.triplet.margin, "triplet margin");
    cmd_train->add_option("--negatives", train.triplet.negatives_per_pair, "negatives per pair");
    cmd_train->add_option("--resample-every", train.triplet.resample_every,
                          "epochs between negative resampling");
    cmd_train->add_option("--phi", train.phi, "top-k per source entity in M_s");
    cmd_train->add_option("--seed", train.seed, "rng seed");
    cmd_train->add_option("--workers", train.workers, "worker threads");
    cmd_train->add_option("--out", train.out, "structure matrix output")->required();
    cmd_train->add_option("--emb-out", train.emb_out, "directory for embedding checkpoints");

    FuseArgs fuse;
    auto* cmd_fuse = app.add_subcommand("fuse", "equal-weight channel fusion M = M_s + M_n");
    cmd_fuse->add_option("--structure", fuse.structure, "structure matrix")->required();
    cmd_fuse->add_option("--name", fuse.name, "name matrix")->required();
    cmd_fuse->add_option("--out", fuse.out, "fused matrix output")->required();

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "Hits@N / MRR evaluation");
    cmd_eval->add_option("--matrix", eval.matrix, "similarity matrix")->required();
    cmd_eval->add_option("--source", eval.source, "source triples file")->required();
    cmd_eval->add_option("--target", eval.target, "target triples file")->required();
    cmd_eval->add_option("--truth", eval.truth, "ground truth seed file")->required();
    cmd_eval->add_option("--ns", eval.ns, "Hits@N cutoffs");
    cmd_eval->add_option("--out", eval.out, "report output");

    PipelineConfig run_cfg;
    std::string run_strategy = "metis-cps";
    std::string run_ablate = "none";
    auto* cmd_run = app.add_subcommand("run", "end-to-end pipeline");
    cmd_run->set_config("--config", "", "flat key=value config file");
    cmd_run->add_option("--source", run_cfg.source_triples, "source triples file")->required();
    cmd_run->add_option("--target", run_cfg.target_triples, "target triples file")->required();
    cmd_run->add_option("--train-seeds", run_cfg.train_seeds, "train seed file");
    cmd_run->add_option("--test-truth", run_cfg.test_truth, "test truth file")->required();
    cmd_run->add_option("--strategy", run_strategy, "vps | metis-cps");
    cmd_run->add_option("--k", run_cfg.k, "mini-batch count");
    cmd_run->add_flag("--unsupervised", run_cfg.unsupervised, "ignore train seeds");
    cmd_run->add_option("--ablate", run_ablate, "none | name | structure");
    cmd_run->add_option("--d-ov", run_cfg.overlap.d_ov, "overlap degree");
    cmd_run->add_option("--w-prime", run_cfg.cps.w_prime, "connected-graph edge weight");
    cmd_run->add_option("--q", run_cfg.cps.q, "hubs per connected graph");
    cmd_run->add_option("--imbalance", run_cfg.cps.imbalance, "balance tolerance");
    cmd_run->add_option("--dim", run_cfg.gnn.dim, "structural embedding dimension");
    cmd_run->add_option("--layers", run_cfg.gnn.layers, "GNN layers");
    cmd_run->add_option("--epochs", run_cfg.triplet.epochs, "training epochs per batch");
    cmd_run->add_option("--lr", run_cfg.triplet.learning_rate, "learning rate");
    cmd_run->add_option("--margin", run_cfg.triplet.margin, "triplet margin");
    cmd_run->add_option("--negatives", run_cfg.triplet.negatives_per_pair, "negatives per pair");
    cmd_run->add_option("--theta", run_cfg.nff.theta, "Jaccard lower bound");
    cmd_run->add_option("--phi", run_cfg.nff.phi, "semantic top-k per source entity");
    cmd_run->add_option("--gamma-fusion", run_cfg.nff.gamma_fusion, "string channel weight");
    cmd_run->add_option("--segments", run_cfg.nff.segments, "segments for semantic search");
    cmd_run->add_option("--minhash-perms", run_cfg.nff.minhash_perms, "MinHash permutations");
    cmd_run->add_option("--hash-dim", run_cfg.hash_dim, "hashing embedder width");
    cmd_run->add_option("--token-vectors", run_cfg.token_vectors, "token vector text file");
    cmd_run->add_option("--src-name-emb", run_cfg.source_name_embeddings,
                        "source entity embedding checkpoint");
    cmd_run->add_option("--tgt-name-emb", run_cfg.target_name_embeddings,
                        "target entity embedding checkpoint");
    cmd_run->add_option("--workers", run_cfg.workers, "worker threads");
    cmd_run->add_option("--seed", run_cfg.rng_seed, "rng seed");
    cmd_run->add_option("--out-dir", run_cfg.out_dir, "output directory");
    cmd_run->add_flag("--save-matrices", run_cfg.save_matrices, "write channel matrices");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gen->parsed()) return run_gen_bench(gen);
        if (cmd_part->parsed()) return run_partition(part);
        if (cmd_name->parsed()) return run_name_sim(name);
        if (cmd_aug->parsed()) return run_augment(aug);
        if (cmd_train->parsed()) return run_train(train);
        if (cmd_fuse->parsed()) return run_fuse(fuse);
        if (cmd_eval->parsed()) return run_eval(eval);
        if (cmd_run->parsed()) {
            if (run_strategy == "vps") {
                run_cfg.strategy = Strategy::Vps;
            } else if (run_strategy == "metis-cps") {
                run_cfg.strategy = Strategy::MetisCps;
            } else {
                throw std::runtime_error("[config] unknown strategy: " + run_strategy);
            }
            if (run_ablate == "none") {
                run_cfg.ablation = Ablation::None;
            } else if (run_ablate == "name") {
                run_cfg.ablation = Ablation::Name;
            } else if (run_ablate == "structure") {
                run_cfg.ablation = Ablation::Structure;
            } else {
                throw std::runtime_error("[config] unknown ablation: " + run_ablate);
            }
            return run_run(run_cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "kgalign: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
