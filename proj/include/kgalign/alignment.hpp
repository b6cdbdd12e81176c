#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgalign/kg.hpp"
#include "kgalign/topk.hpp"
#include "kgalign/types.hpp"

namespace kgalign {

struct EvaluationReport {
    std::map<int, double> hits_at;  // N -> fraction with rank <= N
    double mrr = 0.0;
    std::size_t evaluated_pairs = 0;
    std::optional<double> co_location_rate;
    std::optional<double> edge_cut_rate;
};

// Mutual-argmax (cycle consistency) pseudo seeds: (s, t) is emitted iff t is
// row s's best target and s is column t's best source, ties broken by
// ascending id; pairs touching an endpoint of `existing` are dropped.
SeedAlignment augment_seeds(const TopKSimilarityMatrix& m_n, const SeedAlignment& existing);

// M = M_s + M_n, sparse union-add with equal weights, top-k per row with
// k = max of the input k's.
TopKSimilarityMatrix fuse_channels(const TopKSimilarityMatrix& m_s, const TopKSimilarityMatrix& m_n);

// Row-wise argmax prediction; rows without entries stay unmatched.
AlignmentMapping infer_alignment(const TopKSimilarityMatrix& m);

// Ranking metrics: rank of a truth pair is 1 + the number of stored entries
// in its row scoring strictly above the truth target; absent targets rank
// as infinity.
EvaluationReport evaluate(const TopKSimilarityMatrix& m, const SeedAlignment& truth,
                          const std::vector<int>& ns = {1, 5});

// Fraction of pseudo pairs present in the ground truth.
double augmentation_precision(const SeedAlignment& pseudo, const SeedAlignment& truth);

// Output: `source_label<TAB>target_label<TAB>score` per line.
void save_alignment(const std::string& path, const AlignmentMapping& mapping,
                    const KnowledgeGraph& source, const KnowledgeGraph& target);

// Flat `key = value` report file; keys ordered as given.
void save_report(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& fields);
std::string format_metric(double value);

}  // namespace kgalign
