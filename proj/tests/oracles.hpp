// Test-only oracles, kept independent of the library implementation paths
// they check.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgalign/kg.hpp"
#include "kgalign/partition.hpp"
#include "kgalign/topk.hpp"
#include "kgalign/types.hpp"

namespace oracles {

// Dense boolean adjacency with weights, built straight from triples.
inline std::vector<std::vector<double>> dense_adjacency(const kgalign::KnowledgeGraph& g) {
    const std::size_t n = g.entity_count();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (const auto& t : g.triples) {
        if (t.head == t.tail) continue;
        m[t.head][t.tail] += 1.0;
        m[t.tail][t.head] += 1.0;
    }
    return m;
}

// Weighted cut of an assignment, recomputed from scratch.
inline double cut_of(const kgalign::WeightedGraph& g, const std::vector<std::uint32_t>& assign) {
    double cut = 0.0;
    for (std::uint32_t v = 0; v < g.n; ++v) {
        for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
            if (g.adj[e] > v && assign[g.adj[e]] != assign[v]) cut += g.wgt[e];
        }
    }
    return cut;
}

// Exhaustive minimum over all balanced 2-partitions (small n only).
inline double min_balanced_2cut(const kgalign::WeightedGraph& g, double imbalance,
                                std::vector<std::uint32_t>* best_out = nullptr) {
    const std::uint32_t n = g.n;
    const std::size_t cap = kgalign::part_capacity(n, 2, imbalance);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> assign(n);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        const int ones = __builtin_popcountll(mask);
        if (ones == 0 || ones == static_cast<int>(n)) continue;
        if (static_cast<std::size_t>(ones) > cap || static_cast<std::size_t>(n - ones) > cap) continue;
        for (std::uint32_t v = 0; v < n; ++v) assign[v] = (mask >> v) & 1;
        const double cut = cut_of(g, assign);
        if (cut < best) {
            best = cut;
            if (best_out) *best_out = assign;
        }
    }
    return best;
}

// Random balanced partition: shuffled ids chopped into K equal chunks.
inline std::vector<std::uint32_t> random_balanced_partition(std::size_t n, int k, kgalign::Rng& rng) {
    std::vector<std::uint32_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
    rng.shuffle(ids);
    std::vector<std::uint32_t> assign(n);
    const std::size_t chunk = (n + k - 1) / k;
    for (std::size_t i = 0; i < n; ++i) {
        assign[ids[i]] = static_cast<std::uint32_t>(std::min<std::size_t>(i / chunk, k - 1));
    }
    return assign;
}

// Full-matrix edit distance over bytes of ASCII strings (tests use ASCII).
inline std::size_t levenshtein_full_matrix(const std::string& a, const std::string& b) {
    const std::size_t la = a.size(), lb = b.size();
    std::vector<std::vector<std::size_t>> d(la + 1, std::vector<std::size_t>(lb + 1, 0));
    for (std::size_t i = 0; i <= la; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= lb; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= la; ++i) {
        for (std::size_t j = 1; j <= lb; ++j) {
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
    }
    return d[la][lb];
}

inline double exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Dense matrix view of a sparse top-k matrix (missing entries read as 0).
inline Eigen::MatrixXd densify(const kgalign::TopKSimilarityMatrix& m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.n_source(), m.n_target());
    for (kgalign::EntityId s = 0; s < m.n_source(); ++s) {
        for (const auto& e : m.row(s)) out(s, e.target) = e.score;
    }
    return out;
}

// Mutual-argmax over a dense matrix; zero entries never win against stored
// positives, ties broken by ascending index.
inline std::vector<std::pair<kgalign::EntityId, kgalign::EntityId>> dense_mutual_argmax(
    const Eigen::MatrixXd& m) {
    std::vector<std::pair<kgalign::EntityId, kgalign::EntityId>> out;
    for (Eigen::Index s = 0; s < m.rows(); ++s) {
        Eigen::Index best_t = -1;
        double best = 0.0;
        for (Eigen::Index t = 0; t < m.cols(); ++t) {
            if (m(s, t) > best) {
                best = m(s, t);
                best_t = t;
            }
        }
        if (best_t < 0) continue;
        bool mutual = true;
        for (Eigen::Index s2 = 0; s2 < m.rows(); ++s2) {
            if (m(s2, best_t) > m(s, best_t) || (m(s2, best_t) == m(s, best_t) && s2 < s)) {
                mutual = false;
                break;
            }
        }
        if (mutual) {
            out.emplace_back(static_cast<kgalign::EntityId>(s), static_cast<kgalign::EntityId>(best_t));
        }
    }
    return out;
}

// Hits@N / MRR by fully sorting every row of a dense score matrix, counting
// strictly-greater scores; zero entries of the sparse source are absent.
struct RankReport {
    std::map<int, double> hits;
    double mrr = 0.0;
};

inline RankReport full_sort_ranks(const kgalign::TopKSimilarityMatrix& m,
                                  const std::vector<std::pair<kgalign::EntityId, kgalign::EntityId>>& truth,
                                  const std::vector<int>& ns) {
    RankReport report;
    for (const int n : ns) report.hits[n] = 0.0;
    for (const auto& [s, t] : truth) {
        std::vector<std::pair<double, kgalign::EntityId>> row;
        for (const auto& e : m.row(s)) row.emplace_back(e.score, e.target);
        std::sort(row.rbegin(), row.rend());
        std::size_t rank = 0;
        double truth_score = 0.0;
        bool found = false;
        for (const auto& [score, target] : row) {
            if (target == t) {
                truth_score = score;
                found = true;
            }
        }
        if (found) {
            std::size_t above = 0;
            for (const auto& [score, target] : row) above += score > truth_score;
            rank = above + 1;
        }
        if (rank > 0) {
            report.mrr += 1.0 / static_cast<double>(rank);
            for (const int n : ns) {
                if (rank <= static_cast<std::size_t>(n)) report.hits[n] += 1.0;
            }
        }
    }
    for (auto& [n, h] : report.hits) h /= static_cast<double>(truth.size());
    report.mrr /= static_cast<double>(truth.size());
    return report;
}

// Brute-force Manhattan top-k: (distance asc, index asc).
inline std::vector<std::pair<double, int>> manhattan_topk(const Eigen::MatrixXd& queries,
                                                          const Eigen::MatrixXd& points,
                                                          Eigen::Index row, int k) {
    std::vector<std::pair<double, int>> dists;
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        dists.emplace_back((points.row(j) - queries.row(row)).cwiseAbs().sum(), static_cast<int>(j));
    }
    std::sort(dists.begin(), dists.end());
    if (static_cast<int>(dists.size()) > k) dists.resize(k);
    return dists;
}

}  // namespace oracles
