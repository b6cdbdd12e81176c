#include "kgalign/kg.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace kgalign {

std::uint32_t IdTable::intern(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), id);
    return id;
}

std::optional<std::uint32_t> IdTable::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& IdTable::label(std::uint32_t id) const {
    if (id >= labels_.size()) throw std::out_of_range("IdTable: id out of range");
    return labels_[id];
}

std::vector<std::pair<EntityId, double>> KnowledgeGraph::neighbors(EntityId e) const {
    const auto& row = adjacency_row(e);
    std::vector<std::pair<EntityId, double>> out;
    out.reserve(row.size());
    for (const auto& edge : row) out.emplace_back(edge.neighbor, edge.weight);
    return out;
}

const std::vector<AdjEdge>& KnowledgeGraph::adjacency_row(EntityId e) const {
    if (e >= adjacency.size()) throw std::out_of_range("KnowledgeGraph: entity id out of range");
    return adjacency[e];
}

std::size_t KnowledgeGraph::undirected_edge_count() const {
    std::size_t half_edges = 0;
    for (const auto& row : adjacency) half_edges += row.size();
    return half_edges / 2;
}

KnowledgeGraph build_graph(const std::vector<LabeledTriple>& input) {
    if (input.empty()) throw std::invalid_argument("empty graph");

    KnowledgeGraph g;
    std::set<Triple> seen;
    for (const auto& t : input) {
        if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
            throw std::invalid_argument("triple with empty label");
        }
        Triple triple;
        triple.head = g.entities.intern(t.head);
        triple.relation = g.relations.intern(t.relation);
        triple.tail = g.entities.intern(t.tail);
        if (seen.insert(triple).second) g.triples.push_back(triple);
    }

    // Collapse parallel triples into one undirected edge per entity pair with
    // summed weight; self-loops stay in the triple list only.
    std::map<std::pair<EntityId, EntityId>, std::pair<RelationId, double>> edges;
    for (const auto& t : g.triples) {
        if (t.head == t.tail) continue;
        auto key = std::minmax(t.head, t.tail);
        auto [it, inserted] = edges.try_emplace({key.first, key.second}, t.relation, 1.0);
        if (!inserted) it->second.second += 1.0;
    }
    g.adjacency.assign(g.entities.size(), {});
    for (const auto& [pair, rel_weight] : edges) {
        g.adjacency[pair.first].push_back({pair.second, rel_weight.first, rel_weight.second});
        g.adjacency[pair.second].push_back({pair.first, rel_weight.first, rel_weight.second});
    }
    for (auto& row : g.adjacency) {
        std::sort(row.begin(), row.end(),
                  [](const AdjEdge& a, const AdjEdge& b) { return a.neighbor < b.neighbor; });
    }
    return g;
}

SeedAlignment make_seed_alignment(std::vector<std::pair<EntityId, EntityId>> pairs, SeedKind kind) {
    std::unordered_set<EntityId> sources, targets;
    for (const auto& [s, t] : pairs) {
        if (!sources.insert(s).second) {
            throw std::invalid_argument("seed alignment: duplicate source entity");
        }
        if (!targets.insert(t).second) {
            throw std::invalid_argument("seed alignment: duplicate target entity");
        }
    }
    SeedAlignment out;
    out.pairs = std::move(pairs);
    out.kind = kind;
    return out;
}

void validate_seed_alignment(const SeedAlignment& seeds, const KnowledgeGraph& source,
                             const KnowledgeGraph& target) {
    make_seed_alignment(seeds.pairs, seeds.kind);
    for (const auto& [s, t] : seeds.pairs) {
        if (s >= source.entity_count() || t >= target.entity_count()) {
            throw std::out_of_range("seed alignment: entity id outside graph");
        }
    }
}

SeedAlignment merge_seed_alignments(const SeedAlignment& base, const SeedAlignment& extra,
                                    SeedKind kind) {
    std::unordered_set<EntityId> sources, targets;
    SeedAlignment out;
    out.kind = kind;
    out.pairs = base.pairs;
    for (const auto& [s, t] : base.pairs) {
        sources.insert(s);
        targets.insert(t);
    }
    for (const auto& [s, t] : extra.pairs) {
        if (sources.count(s) || targets.count(t)) continue;
        sources.insert(s);
        targets.insert(t);
        out.pairs.emplace_back(s, t);
    }
    return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

std::vector<LabeledTriple> load_triples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open triples file: " + path);
    std::vector<LabeledTriple> out;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3) {
            throw std::runtime_error("malformed triple line in " + path + ": " + line);
        }
        out.push_back({fields[0], fields[1], fields[2]});
    }
    return out;
}

KnowledgeGraph load_graph(const std::string& path) { return build_graph(load_triples_file(path)); }

void save_triples_file(const std::string& path, const KnowledgeGraph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write triples file: " + path);
    for (const auto& t : g.triples) {
        out << g.entities.label(t.head) << '\t' << g.relations.label(t.relation) << '\t'
            << g.entities.label(t.tail) << '\n';
    }
}

SeedAlignment load_seed_file(const std::string& path, const KnowledgeGraph& source,
                             const KnowledgeGraph& target, SeedKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seed file: " + path);
    std::vector<std::pair<EntityId, EntityId>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 2) {
            throw std::runtime_error("malformed seed line in " + path + ": " + line);
        }
        auto s = source.entities.find(fields[0]);
        auto t = target.entities.find(fields[1]);
        if (!s || !t) {
            throw std::runtime_error("seed references unknown entity: " + line);
        }
        pairs.emplace_back(*s, *t);
    }
    return make_seed_alignment(std::move(pairs), kind);
}

void save_seed_file(const std::string& path, const SeedAlignment& seeds,
                    const KnowledgeGraph& source, const KnowledgeGraph& target) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write seed file: " + path);
    for (const auto& [s, t] : seeds.pairs) {
        out << source.entities.label(s) << '\t' << target.entities.label(t) << '\n';
    }
}

}  // namespace kgalign
