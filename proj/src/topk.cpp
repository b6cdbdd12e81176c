#include "kgalign/topk.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kgalign {

TopKSimilarityMatrix::TopKSimilarityMatrix(std::size_t n_source, std::size_t n_target, int k)
    : rows_(n_source), n_target_(n_target), k_(k) {
    if (k < 1) throw std::invalid_argument("TopKSimilarityMatrix: k must be >= 1");
}

const std::vector<ScoredTarget>& TopKSimilarityMatrix::row(EntityId s) const {
    if (s >= rows_.size()) throw std::out_of_range("TopKSimilarityMatrix: row out of range");
    return rows_[s];
}

std::optional<double> TopKSimilarityMatrix::score(EntityId s, EntityId t) const {
    for (const auto& e : row(s)) {
        if (e.target == t) return e.score;
    }
    return std::nullopt;
}

std::size_t TopKSimilarityMatrix::entry_count() const {
    std::size_t total = 0;
    for (const auto& r : rows_) total += r.size();
    return total;
}

void finalize_row(std::vector<ScoredTarget>& entries, int k) {
    // Dedup targets keeping the max score, then rank.
    std::sort(entries.begin(), entries.end(), [](const ScoredTarget& a, const ScoredTarget& b) {
        if (a.target != b.target) return a.target < b.target;
        return a.score > b.score;
    });
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const ScoredTarget& a, const ScoredTarget& b) {
                                  return a.target == b.target;
                              }),
                  entries.end());
    std::sort(entries.begin(), entries.end(), [](const ScoredTarget& a, const ScoredTarget& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.target < b.target;
    });
    if (static_cast<int>(entries.size()) > k) entries.resize(k);
}

void TopKSimilarityMatrix::set_row(EntityId s, std::vector<ScoredTarget> entries) {
    if (s >= rows_.size()) throw std::out_of_range("TopKSimilarityMatrix: row out of range");
    for (const auto& e : entries) {
        if (e.target >= n_target_) {
            throw std::out_of_range("TopKSimilarityMatrix: target id out of range");
        }
    }
    finalize_row(entries, k_);
    rows_[s] = std::move(entries);
}

void TopKSimilarityMatrix::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write matrix file: " + path);
    out << "kgalign-topk 1 " << rows_.size() << ' ' << n_target_ << ' ' << k_ << '\n';
    char buf[64];
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        for (const auto& e : rows_[s]) {
            std::snprintf(buf, sizeof(buf), "%.17g", e.score);
            out << s << ' ' << e.target << ' ' << buf << '\n';
        }
    }
}

TopKSimilarityMatrix TopKSimilarityMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    std::string magic;
    int version = 0;
    std::size_t n_source = 0, n_target = 0;
    int k = 0;
    in >> magic >> version >> n_source >> n_target >> k;
    if (magic != "kgalign-topk" || version != 1) {
        throw std::runtime_error("not a kgalign-topk file: " + path);
    }
    TopKSimilarityMatrix m(n_source, n_target, k);
    std::vector<std::vector<ScoredTarget>> staging(n_source);
    std::size_t s = 0;
    EntityId t = 0;
    double score = 0.0;
    while (in >> s >> t >> score) {
        if (s >= n_source) throw std::runtime_error("matrix row out of range in " + path);
        staging[s].push_back({t, score});
    }
    for (std::size_t row = 0; row < n_source; ++row) {
        if (!staging[row].empty()) m.set_row(static_cast<EntityId>(row), std::move(staging[row]));
    }
    return m;
}

}  // namespace kgalign
