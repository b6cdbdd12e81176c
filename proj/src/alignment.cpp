#include "kgalign/alignment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace kgalign {

SeedAlignment augment_seeds(const TopKSimilarityMatrix& m_n, const SeedAlignment& existing) {
    constexpr EntityId kNone = std::numeric_limits<EntityId>::max();

    // Column argmax over stored entries: best (score desc, source asc) per target.
    std::vector<std::pair<double, EntityId>> col_best(m_n.n_target(),
                                                      {-std::numeric_limits<double>::infinity(), kNone});
    for (EntityId s = 0; s < m_n.n_source(); ++s) {
        for (const auto& e : m_n.row(s)) {
            auto& best = col_best[e.target];
            if (e.score > best.first || (e.score == best.first && s < best.second)) {
                best = {e.score, s};
            }
        }
    }

    std::unordered_set<EntityId> used_sources, used_targets;
    for (const auto& [s, t] : existing.pairs) {
        used_sources.insert(s);
        used_targets.insert(t);
    }

    SeedAlignment out;
    out.kind = SeedKind::PseudoSeed;
    for (EntityId s = 0; s < m_n.n_source(); ++s) {
        const auto& row = m_n.row(s);
        if (row.empty()) continue;
        const EntityId t = row.front().target;  // rows sorted desc score, ties asc target
        if (col_best[t].second != s) continue;
        if (used_sources.count(s) || used_targets.count(t)) continue;
        out.pairs.emplace_back(s, t);
    }
    return out;
}

namespace {

std::vector<ScoredTarget> union_add(const std::vector<ScoredTarget>& a,
                                    const std::vector<ScoredTarget>& b, int k) {
    std::vector<ScoredTarget> joined;
    joined.reserve(a.size() + b.size());
    joined.insert(joined.end(), a.begin(), a.end());
    joined.insert(joined.end(), b.begin(), b.end());
    std::sort(joined.begin(), joined.end(),
              [](const ScoredTarget& x, const ScoredTarget& y) { return x.target < y.target; });
    std::vector<ScoredTarget> summed;
    for (const auto& e : joined) {
        if (!summed.empty() && summed.back().target == e.target) {
            summed.back().score += e.score;
        } else {
            summed.push_back(e);
        }
    }
    finalize_row(summed, k);
    return summed;
}

}  // namespace

TopKSimilarityMatrix fuse_channels(const TopKSimilarityMatrix& m_s,
                                   const TopKSimilarityMatrix& m_n) {
    if (m_s.n_source() != m_n.n_source() || m_s.n_target() != m_n.n_target()) {
        throw std::invalid_argument("fuse_channels: id-space mismatch");
    }
    const int k = std::max(m_s.k(), m_n.k());
    TopKSimilarityMatrix out(m_s.n_source(), m_s.n_target(), k);
    for (EntityId s = 0; s < m_s.n_source(); ++s) {
        auto fused = union_add(m_s.row(s), m_n.row(s), k);
        if (!fused.empty()) out.set_row(s, std::move(fused));
    }
    return out;
}

AlignmentMapping infer_alignment(const TopKSimilarityMatrix& m) {
    if (m.empty()) throw std::invalid_argument("infer_alignment: matrix has no entries");
    AlignmentMapping out;
    for (EntityId s = 0; s < m.n_source(); ++s) {
        const auto& row = m.row(s);
        if (row.empty()) continue;
        out.matches.push_back({s, row.front().target, row.front().score});
    }
    return out;
}

EvaluationReport evaluate(const TopKSimilarityMatrix& m, const SeedAlignment& truth,
                          const std::vector<int>& ns) {
    if (truth.empty()) throw std::invalid_argument("evaluate: empty truth");
    EvaluationReport report;
    report.evaluated_pairs = truth.size();
    for (const int n : ns) report.hits_at[n] = 0.0;

    double mrr_sum = 0.0;
    for (const auto& [s, t] : truth.pairs) {
        if (s >= m.n_source()) {
            throw std::out_of_range("evaluate: truth source outside matrix row space");
        }
        std::size_t rank = 0;  // 0 encodes infinity
        const auto& row = m.row(s);
        double truth_score = 0.0;
        bool found = false;
        for (const auto& e : row) {
            if (e.target == t) {
                truth_score = e.score;
                found = true;
                break;
            }
        }
        if (found) {
            std::size_t above = 0;
            for (const auto& e : row) {
                if (e.score > truth_score) ++above;
            }
            rank = 1 + above;
        }
        if (rank > 0) {
            mrr_sum += 1.0 / static_cast<double>(rank);
            for (const int n : ns) {
                if (rank <= static_cast<std::size_t>(n)) report.hits_at[n] += 1.0;
            }
        }
    }
    const double denom = static_cast<double>(truth.size());
    for (auto& [n, hits] : report.hits_at) hits /= denom;
    report.mrr = mrr_sum / denom;
    return report;
}

double augmentation_precision(const SeedAlignment& pseudo, const SeedAlignment& truth) {
    if (pseudo.empty()) throw std::invalid_argument("no pseudo seeds");
    std::set<std::pair<EntityId, EntityId>> truth_set(truth.pairs.begin(), truth.pairs.end());
    std::size_t correct = 0;
    for (const auto& pair : pseudo.pairs) correct += truth_set.count(pair);
    return static_cast<double>(correct) / static_cast<double>(pseudo.size());
}

void save_alignment(const std::string& path, const AlignmentMapping& mapping,
                    const KnowledgeGraph& source, const KnowledgeGraph& target) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write alignment file: " + path);
    char buf[32];
    for (const auto& match : mapping.matches) {
        std::snprintf(buf, sizeof(buf), "%.6f", match.score);
        out << source.entities.label(match.source) << '\t' << target.entities.label(match.target)
            << '\t' << buf << '\n';
    }
}

void save_report(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& fields) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    for (const auto& [key, value] : fields) out << key << " = " << value << '\n';
}

std::string format_metric(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

}  // namespace kgalign
