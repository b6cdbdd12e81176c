#include "kgalign/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace kgalign {

namespace {

constexpr double kNormGuard = 1e-12;

int lookup(const std::vector<EntityId>& sorted, EntityId id) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
    if (it == sorted.end() || *it != id) return -1;
    return static_cast<int>(it - sorted.begin());
}

Eigen::MatrixXd aggregate(const BatchGraph& g, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (std::size_t i = 0; i < g.size(); ++i) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
        for (const std::uint32_t j : g.agg_index[i]) acc += x.row(j);
        out.row(static_cast<Eigen::Index>(i)) = acc * g.agg_coef[i];
    }
    return out;
}

// Transpose application: out_j += coef_i * grad_i for every j aggregated by i.
Eigen::MatrixXd aggregate_transpose(const BatchGraph& g, const Eigen::MatrixXd& grad) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grad.rows(), grad.cols());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Eigen::RowVectorXd scaled = grad.row(static_cast<Eigen::Index>(i)) * g.agg_coef[i];
        for (const std::uint32_t j : g.agg_index[i]) out.row(j) += scaled;
    }
    return out;
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation act) {
    if (act == Activation::Identity) return z;
    return z.array().tanh().matrix();
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.row(i) = x.row(i) / (x.row(i).norm() + kNormGuard);
    }
    return out;
}

void check_weights(const GnnConfig& cfg) {
    if (static_cast<int>(cfg.weights.size()) != cfg.layers) {
        throw std::invalid_argument("gnn: weight matrix count does not match layer count");
    }
    for (const auto& w : cfg.weights) {
        if (w.rows() != cfg.dim || w.cols() != cfg.dim) {
            throw std::invalid_argument("gnn: weight matrix shape mismatch");
        }
    }
}

std::vector<int> nearest_pool(const Eigen::MatrixXd& emb, int anchor, std::size_t begin,
                              std::size_t end, int pool_size) {
    std::vector<std::pair<double, int>> dists;
    dists.reserve(end - begin);
    for (std::size_t j = begin; j < end; ++j) {
        if (static_cast<int>(j) == anchor) continue;
        dists.emplace_back((emb.row(static_cast<Eigen::Index>(j)) - emb.row(anchor)).cwiseAbs().sum(),
                           static_cast<int>(j));
    }
    const std::size_t keep = std::min<std::size_t>(pool_size, dists.size());
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(keep), dists.end());
    std::vector<int> pool;
    pool.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) pool.push_back(dists[i].second);
    return pool;
}

}  // namespace

BatchGraph::BatchGraph(const MiniBatch& batch)
    : ns(batch.source.entities.size()),
      nt(batch.target.entities.size()),
      source_entities(batch.source.entities),
      target_entities(batch.target.entities) {
    const std::size_t n = ns + nt;
    std::vector<std::set<std::uint32_t>> nbr(n);
    auto add_edges = [&](const std::vector<Triple>& triples, const std::vector<EntityId>& ids,
                         std::size_t offset) {
        for (const auto& t : triples) {
            if (t.head == t.tail) continue;
            const int a = lookup(ids, t.head);
            const int b = lookup(ids, t.tail);
            if (a < 0 || b < 0) throw std::invalid_argument("BatchGraph: triple outside batch");
            nbr[offset + a].insert(static_cast<std::uint32_t>(offset + b));
            nbr[offset + b].insert(static_cast<std::uint32_t>(offset + a));
        }
    };
    add_edges(batch.source.triples, source_entities, 0);
    add_edges(batch.target.triples, target_entities, ns);

    agg_index.resize(n);
    agg_coef.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        agg_index[i].push_back(static_cast<std::uint32_t>(i));
        agg_index[i].insert(agg_index[i].end(), nbr[i].begin(), nbr[i].end());
        agg_coef[i] = 1.0 / static_cast<double>(agg_index[i].size());
    }
}

int BatchGraph::local_source(EntityId global) const { return lookup(source_entities, global); }

int BatchGraph::local_target(EntityId global) const {
    const int idx = lookup(target_entities, global);
    return idx < 0 ? -1 : idx + static_cast<int>(ns);
}

EmbeddingTable gnn_forward(const MiniBatch& batch, const GnnConfig& cfg,
                           const EmbeddingTable& init) {
    const BatchGraph graph(batch);
    if (init.size() != graph.size() || init.dim() != cfg.dim) {
        throw std::invalid_argument("gnn_forward: init table does not cover batch at cfg.dim");
    }
    check_weights(cfg);
    Eigen::MatrixXd x = init.vectors;
    for (int l = 0; l < cfg.layers; ++l) {
        x = activate(aggregate(graph, x) * cfg.weights[l], cfg.activation);
    }
    EmbeddingTable out;
    out.vectors = normalize_rows(x);
    return out;
}

std::vector<std::pair<EntityId, EntityId>> sample_negatives(const MiniBatch& batch,
                                                            const EmbeddingTable& emb,
                                                            std::pair<EntityId, EntityId> pair, int n,
                                                            std::uint64_t rng_seed) {
    const BatchGraph graph(batch);
    if (graph.ns < 2 || graph.nt < 2) {
        throw std::invalid_argument("sample_negatives: batch needs >= 2 entities per side");
    }
    if (emb.size() != graph.size()) {
        throw std::invalid_argument("sample_negatives: embedding table does not cover batch");
    }
    const int s = graph.local_source(pair.first);
    const int t = graph.local_target(pair.second);
    if (s < 0 || t < 0) throw std::invalid_argument("sample_negatives: pair outside batch");

    const int pool_size = std::max(25, 5 * n);
    const auto src_pool = nearest_pool(emb.vectors, s, 0, graph.ns, pool_size);
    const auto tgt_pool = nearest_pool(emb.vectors, t, graph.ns, graph.size(), pool_size);

    Rng rng(rng_seed);
    std::vector<std::pair<EntityId, EntityId>> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
        if (j % 2 == 0) {
            const int pick = src_pool[rng.index(src_pool.size())];
            out.emplace_back(graph.source_entities[pick], pair.second);
        } else {
            const int pick = tgt_pool[rng.index(tgt_pool.size())];
            out.emplace_back(pair.first,
                             graph.target_entities[static_cast<std::size_t>(pick) - graph.ns]);
        }
    }
    return out;
}

double triplet_loss_value(const MiniBatch& batch, const EmbeddingTable& emb,
                          const SeedAlignment& pairs,
                          const std::vector<std::vector<std::pair<EntityId, EntityId>>>& negatives,
                          const TripletConfig& cfg) {
    if (negatives.size() != pairs.size()) {
        throw std::invalid_argument("triplet_loss_value: negatives per pair mismatch");
    }
    const BatchGraph graph(batch);
    auto dist = [&](EntityId s, EntityId t) {
        const int a = graph.local_source(s);
        const int b = graph.local_target(t);
        if (a < 0 || b < 0) throw std::invalid_argument("triplet_loss_value: pair outside batch");
        return (emb.vectors.row(a) - emb.vectors.row(b)).cwiseAbs().sum();
    };
    double loss = 0.0;
    for (std::size_t i = 0; i < pairs.pairs.size(); ++i) {
        const double d_pos = dist(pairs.pairs[i].first, pairs.pairs[i].second);
        for (const auto& neg : negatives[i]) {
            loss += std::max(0.0, d_pos + cfg.margin - dist(neg.first, neg.second));
        }
    }
    return loss;
}

BatchTrainer::BatchTrainer(const MiniBatch& batch, const GnnConfig& gnn,
                           const TripletConfig& triplet, std::uint64_t rng_seed)
    : graph_(batch), gnn_(gnn), triplet_(triplet), rng_seed_(rng_seed) {
    if (gnn_.dim < 1 || gnn_.layers < 1) {
        throw std::invalid_argument("BatchTrainer: invalid gnn config");
    }
    if (triplet_.margin <= 0.0) throw std::invalid_argument("BatchTrainer: margin must be > 0");

    Rng rng(rng_seed_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(gnn_.dim));
    h0_.resize(static_cast<Eigen::Index>(graph_.size()), gnn_.dim);
    for (Eigen::Index i = 0; i < h0_.rows(); ++i) {
        for (Eigen::Index d = 0; d < h0_.cols(); ++d) h0_(i, d) = rng.symmetric(scale);
    }
    if (gnn_.weights.empty()) {
        const double w_scale = std::sqrt(3.0 / static_cast<double>(gnn_.dim));
        for (int l = 0; l < gnn_.layers; ++l) {
            Eigen::MatrixXd w(gnn_.dim, gnn_.dim);
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.symmetric(w_scale);
            }
            weights_.push_back(std::move(w));
        }
    } else {
        check_weights(gnn_);
        weights_ = gnn_.weights;
    }

    for (const auto& [s, t] : batch.local_seeds.pairs) {
        const int a = graph_.local_source(s);
        const int b = graph_.local_target(t);
        if (a < 0 || b < 0) throw std::invalid_argument("BatchTrainer: seed outside batch");
        positives_.emplace_back(a, b);
    }
    if (positives_.empty()) {
        std::cerr << "[kgalign] warning: batch without local seeds, skipping training\n";
        trainable_ = false;
    } else if (graph_.ns < 2 || graph_.nt < 2) {
        std::cerr << "[kgalign] warning: batch too small for negative sampling, skipping training\n";
        trainable_ = false;
    }

    m_h0_ = Eigen::MatrixXd::Zero(h0_.rows(), h0_.cols());
    v_h0_ = Eigen::MatrixXd::Zero(h0_.rows(), h0_.cols());
    for (const auto& w : weights_) {
        m_w_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        v_w_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
}

Eigen::MatrixXd BatchTrainer::forward(std::vector<Eigen::MatrixXd>* tape) const {
    Eigen::MatrixXd x = h0_;
    if (tape) {
        tape->clear();
        tape->push_back(x);
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        x = activate(aggregate(graph_, x) * weights_[l], gnn_.activation);
        if (tape) tape->push_back(x);
    }
    return normalize_rows(x);
}

void BatchTrainer::resample_negatives(std::uint64_t salt) {
    const Eigen::MatrixXd y = forward(nullptr);
    const int pool_size = std::max(25, 5 * triplet_.negatives_per_pair);

    std::unordered_map<int, std::vector<int>> pools;
    auto pool_for = [&](int anchor, bool source_side) -> const std::vector<int>& {
        auto it = pools.find(anchor);
        if (it != pools.end()) return it->second;
        auto pool = source_side ? nearest_pool(y, anchor, 0, graph_.ns, pool_size)
                                : nearest_pool(y, anchor, graph_.ns, graph_.size(), pool_size);
        return pools.emplace(anchor, std::move(pool)).first->second;
    };

    Rng rng(derive_seed(rng_seed_, 0xA1, salt));
    negatives_.assign(positives_.size(), {});
    for (std::size_t i = 0; i < positives_.size(); ++i) {
        const auto [a, b] = positives_[i];
        auto& negs = negatives_[i];
        negs.reserve(triplet_.negatives_per_pair);
        for (int j = 0; j < triplet_.negatives_per_pair; ++j) {
            if (j % 2 == 0) {
                const auto& pool = pool_for(a, true);
                negs.emplace_back(pool[rng.index(pool.size())], b);
            } else {
                const auto& pool = pool_for(b, false);
                negs.emplace_back(a, pool[rng.index(pool.size())]);
            }
        }
    }
}

double BatchTrainer::loss() const {
    const Eigen::MatrixXd y = forward(nullptr);
    double loss = 0.0;
    for (std::size_t i = 0; i < positives_.size(); ++i) {
        const auto [a, b] = positives_[i];
        const double d_pos = (y.row(a) - y.row(b)).cwiseAbs().sum();
        for (const auto& [c, e] : negatives_[i]) {
            loss += std::max(0.0, d_pos + triplet_.margin - (y.row(c) - y.row(e)).cwiseAbs().sum());
        }
    }
    return loss;
}

std::pair<double, BatchTrainer::Gradients> BatchTrainer::loss_and_gradients() const {
    std::vector<Eigen::MatrixXd> tape;
    const Eigen::MatrixXd y = forward(&tape);
    const Eigen::MatrixXd& x_final = tape.back();

    // Hinge terms and dL/dY. sign(0) contributes 0.
    double loss = 0.0;
    Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(y.rows(), y.cols());
    auto sign_vec = [](const Eigen::RowVectorXd& v) {
        return v.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
    };
    for (std::size_t i = 0; i < positives_.size(); ++i) {
        const auto [a, b] = positives_[i];
        const Eigen::RowVectorXd diff_pos = y.row(a) - y.row(b);
        const double d_pos = diff_pos.cwiseAbs().sum();
        for (const auto& [c, e] : negatives_[i]) {
            const Eigen::RowVectorXd diff_neg = y.row(c) - y.row(e);
            const double d_neg = diff_neg.cwiseAbs().sum();
            const double term = d_pos + triplet_.margin - d_neg;
            if (term <= 0.0) continue;
            loss += term;
            const Eigen::RowVectorXd sp = sign_vec(diff_pos);
            const Eigen::RowVectorXd sn = sign_vec(diff_neg);
            dy.row(a) += sp;
            dy.row(b) -= sp;
            dy.row(c) -= sn;
            dy.row(e) += sn;
        }
    }

    // Through row normalization y = x / (|x| + guard).
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const double r = x_final.row(i).norm();
        const double denom = r + kNormGuard;
        const Eigen::RowVectorXd g = dy.row(i);
        if (r > 0.0) {
            grad.row(i) = g / denom -
                          x_final.row(i) * (x_final.row(i).dot(g) / (r * denom * denom));
        } else {
            grad.row(i) = g / denom;
        }
    }

    Gradients out;
    out.weights.resize(weights_.size());
    for (int l = static_cast<int>(weights_.size()) - 1; l >= 0; --l) {
        const Eigen::MatrixXd& activated = tape[static_cast<std::size_t>(l) + 1];
        Eigen::MatrixXd dz;
        if (gnn_.activation == Activation::Tanh) {
            dz = grad.cwiseProduct((1.0 - activated.array().square()).matrix());
        } else {
            dz = grad;
        }
        const Eigen::MatrixXd aggregated = aggregate(graph_, tape[static_cast<std::size_t>(l)]);
        out.weights[static_cast<std::size_t>(l)] = aggregated.transpose() * dz;
        grad = aggregate_transpose(graph_, dz * weights_[static_cast<std::size_t>(l)].transpose());
    }
    out.init = std::move(grad);
    return {loss, std::move(out)};
}

void BatchTrainer::adam_step(const Gradients& grads) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    adam_t_ += 1;
    const double bc1 = 1.0 - std::pow(beta1, adam_t_);
    const double bc2 = 1.0 - std::pow(beta2, adam_t_);
    auto update = [&](Eigen::MatrixXd& param, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                      const Eigen::MatrixXd& g) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        param -= triplet_.learning_rate *
                 ((m / bc1).array() / ((v / bc2).array().sqrt() + eps)).matrix();
    };
    update(h0_, m_h0_, v_h0_, grads.init);
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        update(weights_[l], m_w_[l], v_w_[l], grads.weights[l]);
    }
}

void BatchTrainer::train() {
    if (!trainable_) return;
    for (int epoch = 0; epoch < triplet_.epochs; ++epoch) {
        if (epoch % std::max(1, triplet_.resample_every) == 0) {
            resample_negatives(static_cast<std::uint64_t>(epoch));
        }
        auto [loss, grads] = loss_and_gradients();
        loss_history_.push_back(loss);
        adam_step(grads);
    }
}

EmbeddingTable BatchTrainer::embeddings() const {
    EmbeddingTable out;
    out.vectors = forward(nullptr);
    return out;
}

EmbeddingTable train_batch(const MiniBatch& batch, const GnnConfig& gnn,
                           const TripletConfig& triplet, std::uint64_t rng_seed) {
    BatchTrainer trainer(batch, gnn, triplet, rng_seed);
    trainer.train();
    return trainer.embeddings();
}

TopKSimilarityMatrix structure_similarity(const std::vector<MiniBatch>& batches,
                                          const std::vector<EmbeddingTable>& embeddings, int k,
                                          std::size_t n_source, std::size_t n_target) {
    if (k < 1) throw std::invalid_argument("structure_similarity: k must be >= 1");
    if (batches.size() != embeddings.size()) {
        throw std::invalid_argument("structure_similarity: one embedding table per batch required");
    }

    struct RawEntry {
        EntityId source;
        EntityId target;
        double dist;
    };
    std::vector<RawEntry> entries;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
        const auto& batch = batches[bi];
        const auto& emb = embeddings[bi].vectors;
        const std::size_t ns = batch.source.entities.size();
        const std::size_t nt = batch.target.entities.size();
        if (static_cast<std::size_t>(emb.rows()) != ns + nt) {
            throw std::invalid_argument("structure_similarity: embedding rows mismatch batch");
        }
        if (nt == 0) continue;
        const auto targets = emb.middleRows(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nt));
        std::vector<std::pair<double, EntityId>> cands(nt);
        for (std::size_t si = 0; si < ns; ++si) {
            const Eigen::VectorXd dist =
                (targets.rowwise() - emb.row(static_cast<Eigen::Index>(si))).cwiseAbs().rowwise().sum();
            for (std::size_t ti = 0; ti < nt; ++ti) {
                cands[ti] = {dist(static_cast<Eigen::Index>(ti)), batch.target.entities[ti]};
            }
            const std::size_t keep = std::min<std::size_t>(k, cands.size());
            std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                              cands.end());
            for (std::size_t i = 0; i < keep; ++i) {
                entries.push_back({batch.source.entities[si], cands[i].second, cands[i].first});
            }
        }
    }

    TopKSimilarityMatrix m(n_source, n_target, k);
    if (entries.empty()) return m;
    double d_min = entries.front().dist, d_max = entries.front().dist;
    for (const auto& e : entries) {
        d_min = std::min(d_min, e.dist);
        d_max = std::max(d_max, e.dist);
    }
    const double denom = d_max - d_min + 1e-8;
    std::vector<std::vector<ScoredTarget>> staging(n_source);
    for (const auto& e : entries) {
        staging[e.source].push_back({e.target, 1.0 - (e.dist - d_min) / denom});
    }
    for (std::size_t s = 0; s < n_source; ++s) {
        if (!staging[s].empty()) m.set_row(static_cast<EntityId>(s), std::move(staging[s]));
    }
    return m;
}

void verify_block_diagonal(const TopKSimilarityMatrix& m, const std::vector<MiniBatch>& batches) {
    std::unordered_map<EntityId, std::vector<int>> src_batches, tgt_batches;
    for (const auto& b : batches) {
        for (const EntityId e : b.source.entities) src_batches[e].push_back(b.index);
        for (const EntityId e : b.target.entities) tgt_batches[e].push_back(b.index);
    }
    for (EntityId s = 0; s < m.n_source(); ++s) {
        for (const auto& entry : m.row(s)) {
            auto si = src_batches.find(s);
            auto ti = tgt_batches.find(entry.target);
            bool shared = false;
            if (si != src_batches.end() && ti != tgt_batches.end()) {
                for (const int a : si->second) {
                    for (const int b : ti->second) {
                        if (a == b) {
                            shared = true;
                            break;
                        }
                    }
                    if (shared) break;
                }
            }
            if (!shared) {
                throw std::logic_error("structure similarity entry crosses mini-batches");
            }
        }
    }
    if (m.entry_count() > static_cast<std::size_t>(m.k()) * m.n_source()) {
        throw std::logic_error("structure similarity exceeds k * |E_s| storage bound");
    }
}

}  // namespace kgalign
