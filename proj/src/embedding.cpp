#include "kgalign/embedding.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kgalign {

namespace {
constexpr char kMagic[8] = {'K', 'G', 'A', 'E', 'M', 'B', '0', '1'};
}

double manhattan_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                          const Eigen::Ref<const Eigen::RowVectorXd>& b) {
    return (a - b).cwiseAbs().sum();
}

void save_embeddings(const std::string& path, const EmbeddingTable& table,
                     const std::vector<std::string>& labels) {
    if (labels.size() != table.size()) {
        throw std::invalid_argument("save_embeddings: label count mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write embedding file: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t n = static_cast<std::uint32_t>(table.size());
    const std::uint32_t dim = static_cast<std::uint32_t>(table.dim());
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    std::vector<float> row(dim);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t d = 0; d < dim; ++d) {
            row[d] = static_cast<float>(table.vectors(i, d));
        }
        out.write(reinterpret_cast<const char*>(row.data()), sizeof(float) * dim);
    }
    std::ofstream side(path + ".labels");
    if (!side) throw std::runtime_error("cannot write label sidecar: " + path + ".labels");
    for (const auto& label : labels) side << label << '\n';
}

std::pair<EmbeddingTable, std::vector<std::string>> load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embedding file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not an embedding checkpoint: " + path);
    }
    std::uint32_t n = 0, dim = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in || dim == 0) throw std::runtime_error("corrupt embedding header: " + path);
    EmbeddingTable table(n, static_cast<int>(dim));
    std::vector<float> row(dim);
    for (std::uint32_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()), sizeof(float) * dim);
        if (!in) throw std::runtime_error("truncated embedding file: " + path);
        for (std::uint32_t d = 0; d < dim; ++d) table.vectors(i, d) = row[d];
    }

    std::vector<std::string> labels;
    std::ifstream side(path + ".labels");
    if (side) {
        std::string line;
        while (std::getline(side, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            labels.push_back(line);
        }
        if (labels.size() != n) {
            throw std::runtime_error("label sidecar row count mismatch: " + path + ".labels");
        }
    }
    return {std::move(table), std::move(labels)};
}

}  // namespace kgalign
