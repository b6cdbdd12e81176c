#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "kgalign/embedding.hpp"
#include "kgalign/minibatch.hpp"
#include "kgalign/topk.hpp"
#include "kgalign/types.hpp"

namespace kgalign {

enum class Activation { Tanh, Identity };

struct GnnConfig {
    int layers = 2;
    int dim = 100;
    Activation activation = Activation::Tanh;
    // Optional preset weight matrices, one dim x dim matrix per layer; when
    // empty train_batch draws its own.
    std::vector<Eigen::MatrixXd> weights;
};

struct TripletConfig {
    double margin = 1.0;  // gamma_margin
    int negatives_per_pair = 5;
    int epochs = 100;
    double learning_rate = 0.005;
    int resample_every = 10;  // epochs between negative resampling
};

// Batch-local view shared by forward, training and similarity code. Local
// indices are 0..ns-1 for source entities (in sorted entity order) and
// ns..ns+nt-1 for target entities.
struct BatchGraph {
    explicit BatchGraph(const MiniBatch& batch);

    std::size_t size() const { return ns + nt; }
    int local_source(EntityId global) const;  // -1 when absent
    int local_target(EntityId global) const;

    std::size_t ns = 0;
    std::size_t nt = 0;
    std::vector<EntityId> source_entities;  // sorted
    std::vector<EntityId> target_entities;  // sorted
    // Mean-aggregation operator over {self} + undirected neighbors.
    std::vector<std::vector<std::uint32_t>> agg_index;
    std::vector<double> agg_coef;  // 1 / (1 + degree)
};

// Mean-aggregation GNN: per layer aggregate over {self} + neighbors, linear
// transform, activation; final rows L2-normalized.
EmbeddingTable gnn_forward(const MiniBatch& batch, const GnnConfig& cfg,
                           const EmbeddingTable& init);

// Nearest-neighbor negative sampling for one positive pair: alternating
// sides, the replaced entity drawn uniformly from its max(25, 5n) nearest
// same-side batch entities; never yields the true pair.
std::vector<std::pair<EntityId, EntityId>> sample_negatives(const MiniBatch& batch,
                                                            const EmbeddingTable& emb,
                                                            std::pair<EntityId, EntityId> pair, int n,
                                                            std::uint64_t rng_seed);

// Hinge loss: sum over (positive, negative) combinations of
// max(0, d_pos + margin - d_neg), Manhattan distances.
double triplet_loss_value(const MiniBatch& batch, const EmbeddingTable& emb,
                          const SeedAlignment& pairs,
                          const std::vector<std::vector<std::pair<EntityId, EntityId>>>& negatives,
                          const TripletConfig& cfg);

// Full training state for one mini-batch; exposes parameters and analytic
// gradients so they can be checked against finite differences.
class BatchTrainer {
public:
    BatchTrainer(const MiniBatch& batch, const GnnConfig& gnn, const TripletConfig& triplet,
                 std::uint64_t rng_seed);

    bool trainable() const { return trainable_; }
    void train();

    EmbeddingTable embeddings() const;  // final normalized rows, batch-local layout
    const std::vector<double>& loss_history() const { return loss_history_; }

    struct Gradients {
        Eigen::MatrixXd init;
        std::vector<Eigen::MatrixXd> weights;
    };

    void resample_negatives(std::uint64_t salt);
    double loss() const;
    std::pair<double, Gradients> loss_and_gradients() const;

    Eigen::MatrixXd& initial_embeddings() { return h0_; }
    std::vector<Eigen::MatrixXd>& weight_matrices() { return weights_; }
    const BatchGraph& graph() const { return graph_; }

private:
    Eigen::MatrixXd forward(std::vector<Eigen::MatrixXd>* tape) const;
    void adam_step(const Gradients& grads);

    BatchGraph graph_;
    GnnConfig gnn_;
    TripletConfig triplet_;
    std::uint64_t rng_seed_;
    bool trainable_ = true;

    std::vector<std::pair<int, int>> positives_;               // local indices
    std::vector<std::vector<std::pair<int, int>>> negatives_;  // local, per positive

    Eigen::MatrixXd h0_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<double> loss_history_;

    int adam_t_ = 0;
    Eigen::MatrixXd m_h0_, v_h0_;
    std::vector<Eigen::MatrixXd> m_w_, v_w_;
};

// Initializes embeddings from U(-1/sqrt(dim), 1/sqrt(dim)), trains with
// full-batch steps for cfg.epochs epochs resampling negatives every
// resample_every epochs, returns final normalized embeddings. Batches
// without local seeds (or too small for negative sampling) return the
// normalized initialization with a warning.
EmbeddingTable train_batch(const MiniBatch& batch, const GnnConfig& gnn,
                           const TripletConfig& triplet, std::uint64_t rng_seed);

// Block-diagonal structural top-k similarity: per batch, every source entity
// is scored against every in-batch target entity by Manhattan distance;
// distances convert to similarities by global min-max over kept entries.
TopKSimilarityMatrix structure_similarity(const std::vector<MiniBatch>& batches,
                                          const std::vector<EmbeddingTable>& embeddings, int k,
                                          std::size_t n_source, std::size_t n_target);

// Throws unless every stored entry has both endpoints in one batch and the
// total entry count is within k * n_source.
void verify_block_diagonal(const TopKSimilarityMatrix& m, const std::vector<MiniBatch>& batches);

}  // namespace kgalign
