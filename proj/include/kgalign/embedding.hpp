#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kgalign/types.hpp"

namespace kgalign {

// Dense fixed-dimension vectors, one row per entity. Row meaning depends on
// context: graph-global entity id for name embeddings, batch-local index
// (source entities first, then target entities) for structure embeddings.
struct EmbeddingTable {
    Eigen::MatrixXd vectors;  // n x dim

    EmbeddingTable() = default;
    EmbeddingTable(std::size_t n, int dim) : vectors(Eigen::MatrixXd::Zero(n, dim)) {}

    int dim() const { return static_cast<int>(vectors.cols()); }
    std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
};

double manhattan_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                          const Eigen::Ref<const Eigen::RowVectorXd>& b);

// Checkpoint: 8-byte magic "KGAEMB01", u32 entity count, u32 dim, row-major
// f32 data; sidecar text file `<path>.labels` holds one entity label per row.
void save_embeddings(const std::string& path, const EmbeddingTable& table,
                     const std::vector<std::string>& labels);
std::pair<EmbeddingTable, std::vector<std::string>> load_embeddings(const std::string& path);

}  // namespace kgalign
