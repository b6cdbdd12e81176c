#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kgalign/types.hpp"

namespace kgalign {

struct ScoredTarget {
    EntityId target = 0;
    double score = 0.0;
};

// Row-sparse similarity matrix keeping at most k scored target candidates per
// source entity. Rows are sorted by descending score, ties by ascending
// target id; targets are unique within a row.
class TopKSimilarityMatrix {
public:
    TopKSimilarityMatrix() = default;
    TopKSimilarityMatrix(std::size_t n_source, std::size_t n_target, int k);

    std::size_t n_source() const { return rows_.size(); }
    std::size_t n_target() const { return n_target_; }
    int k() const { return k_; }

    const std::vector<ScoredTarget>& row(EntityId s) const;
    std::optional<double> score(EntityId s, EntityId t) const;
    std::size_t entry_count() const;
    bool empty() const { return entry_count() == 0; }

    // Sorts, deduplicates targets (max score wins), truncates to k.
    void set_row(EntityId s, std::vector<ScoredTarget> entries);

    void save(const std::string& path) const;
    static TopKSimilarityMatrix load(const std::string& path);

private:
    std::vector<std::vector<ScoredTarget>> rows_;
    std::size_t n_target_ = 0;
    int k_ = 0;
};

// Normalizes entries sorted-descending with unique targets and truncates.
void finalize_row(std::vector<ScoredTarget>& entries, int k);

}  // namespace kgalign
