#include "kgalign/minibatch.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace kgalign {

namespace {

SeedAlignment restrict_seeds(const SeedAlignment& seeds, const std::vector<EntityId>& src_entities,
                             const std::vector<EntityId>& tgt_entities) {
    std::unordered_set<EntityId> src(src_entities.begin(), src_entities.end());
    std::unordered_set<EntityId> tgt(tgt_entities.begin(), tgt_entities.end());
    SeedAlignment out;
    out.kind = seeds.kind;
    for (const auto& [s, t] : seeds.pairs) {
        if (src.count(s) && tgt.count(t)) out.pairs.emplace_back(s, t);
    }
    return out;
}

std::vector<MiniBatch> batches_from_assignments(const KnowledgeGraph& g_s,
                                                const KnowledgeGraph& g_t,
                                                const std::vector<std::uint32_t>& src_assign,
                                                const std::vector<std::uint32_t>& tgt_assign,
                                                int k, const SeedAlignment& seeds) {
    std::vector<std::vector<EntityId>> src_parts(k), tgt_parts(k);
    for (EntityId e = 0; e < src_assign.size(); ++e) src_parts[src_assign[e]].push_back(e);
    for (EntityId e = 0; e < tgt_assign.size(); ++e) tgt_parts[tgt_assign[e]].push_back(e);

    std::vector<MiniBatch> batches(k);
    for (int i = 0; i < k; ++i) {
        batches[i].index = i;
        batches[i].source = induce_subgraph(g_s, src_parts[i]);
        batches[i].target = induce_subgraph(g_t, tgt_parts[i]);
        batches[i].local_seeds = restrict_seeds(seeds, src_parts[i], tgt_parts[i]);
    }
    return batches;
}

}  // namespace

Subgraph induce_subgraph(const KnowledgeGraph& g, const std::vector<EntityId>& entities) {
    Subgraph out;
    out.entities = entities;
    std::sort(out.entities.begin(), out.entities.end());
    std::unordered_set<EntityId> members(out.entities.begin(), out.entities.end());
    for (const auto& t : g.triples) {
        if (members.count(t.head) && members.count(t.tail)) out.triples.push_back(t);
    }
    return out;
}

std::vector<MiniBatch> vps(const KnowledgeGraph& g_s, const KnowledgeGraph& g_t,
                           const SeedAlignment& seeds, int k, std::uint64_t rng_seed) {
    if (k < 1) throw std::invalid_argument("vps: K must be >= 1");
    Rng rng(rng_seed);

    std::vector<std::uint32_t> src_assign(g_s.entity_count(), 0);
    std::vector<std::uint32_t> tgt_assign(g_t.entity_count(), 0);
    std::vector<bool> src_seeded(g_s.entity_count(), false);
    std::vector<bool> tgt_seeded(g_t.entity_count(), false);

    for (std::size_t i = 0; i < seeds.pairs.size(); ++i) {
        const auto batch = static_cast<std::uint32_t>(i % k);
        src_assign[seeds.pairs[i].first] = batch;
        tgt_assign[seeds.pairs[i].second] = batch;
        src_seeded[seeds.pairs[i].first] = true;
        tgt_seeded[seeds.pairs[i].second] = true;
    }
    for (EntityId e = 0; e < src_assign.size(); ++e) {
        if (!src_seeded[e]) src_assign[e] = static_cast<std::uint32_t>(rng.index(k));
    }
    for (EntityId e = 0; e < tgt_assign.size(); ++e) {
        if (!tgt_seeded[e]) tgt_assign[e] = static_cast<std::uint32_t>(rng.index(k));
    }
    return batches_from_assignments(g_s, g_t, src_assign, tgt_assign, k, seeds);
}

WeightedGraph cps_reweight_target(const KnowledgeGraph& g_t, const SeedAlignment& seeds,
                                  const Partition& source_parts, const CpsConfig& cfg,
                                  std::uint64_t rng_seed) {
    const std::uint32_t n = static_cast<std::uint32_t>(g_t.entity_count());
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    // Target seed entity -> part of its source counterpart.
    std::vector<std::uint32_t> seed_part(n, kNone);
    std::vector<std::vector<EntityId>> l_t(cfg.k);
    for (const auto& [s, t] : seeds.pairs) {
        const auto part = source_parts.assignment.at(s);
        seed_part[t] = part;
        l_t[part].push_back(t);
    }

    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;
    std::set<std::pair<EntityId, EntityId>> existing;
    for (EntityId u = 0; u < n; ++u) {
        for (const auto& e : g_t.adjacency[u]) {
            if (e.neighbor <= u) continue;
            existing.insert({u, e.neighbor});
            double w = e.weight;
            if (seed_part[u] != kNone && seed_part[e.neighbor] != kNone) {
                // Phase 1 raises in-group edges, Phase 2 zeroes cross-group ones.
                w = seed_part[u] == seed_part[e.neighbor] ? cfg.w_prime : 0.0;
            }
            edges.emplace_back(u, e.neighbor, w);
        }
    }

    // Phase 1 virtual star edges: q hubs per connected graph reach every
    // other member.
    Rng rng(rng_seed);
    const std::size_t cap = part_capacity(n, cfg.k, cfg.imbalance);
    for (int part = 0; part < cfg.k; ++part) {
        auto& members = l_t[part];
        std::sort(members.begin(), members.end());
        if (members.size() < 2) continue;
        if (members.size() > cap) {
            std::cerr << "[kgalign] warning: seed group of part " << part << " has "
                      << members.size() << " entities, exceeding part capacity " << cap
                      << "; balance constraint wins and excess members spill\n";
        }
        const int hubs = std::min<int>(cfg.q, static_cast<int>(members.size()));
        std::vector<EntityId> pool = members;
        for (int h = 0; h < hubs; ++h) {
            const std::size_t pick = rng.index(pool.size());
            const EntityId hub = pool[pick];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            for (const EntityId m : members) {
                if (m == hub) continue;
                const auto key = std::minmax(hub, m);
                if (existing.count({key.first, key.second})) continue;
                existing.insert({key.first, key.second});
                edges.emplace_back(key.first, key.second, cfg.w_prime);
            }
        }
    }
    return weighted_from_edges(n, edges);
}

std::vector<MiniBatch> metis_cps(const KnowledgeGraph& g_s, const KnowledgeGraph& g_t,
                                 const SeedAlignment& seeds, const CpsConfig& cfg,
                                 std::uint64_t rng_seed) {
    if (cfg.k < 1) throw std::invalid_argument("metis_cps: K must be >= 1");
    const int k = cfg.k;

    Partition ps = partition_kway(g_s, k, cfg.imbalance, derive_seed(rng_seed, 1));
    Partition pt;
    if (seeds.empty()) {
        pt = partition_kway(g_t, k, cfg.imbalance, derive_seed(rng_seed, 2));
    } else {
        const WeightedGraph view =
            cps_reweight_target(g_t, seeds, ps, cfg, derive_seed(rng_seed, 3));
        pt = partition_kway(view, k, cfg.imbalance, derive_seed(rng_seed, 2));
    }

    // Greedy maximum-seed-overlap pairing of source parts to target parts.
    std::vector<std::vector<std::size_t>> overlap(k, std::vector<std::size_t>(k, 0));
    for (const auto& [s, t] : seeds.pairs) {
        overlap[ps.assignment[s]][pt.assignment[t]] += 1;
    }
    std::vector<int> match(k, -1);
    std::vector<bool> src_used(k, false), tgt_used(k, false);
    for (int round = 0; round < k; ++round) {
        int best_i = -1, best_j = -1;
        std::size_t best = 0;
        bool found = false;
        for (int i = 0; i < k; ++i) {
            if (src_used[i]) continue;
            for (int j = 0; j < k; ++j) {
                if (tgt_used[j]) continue;
                if (!found || overlap[i][j] > best) {
                    best = overlap[i][j];
                    best_i = i;
                    best_j = j;
                    found = true;
                }
            }
        }
        match[best_i] = best_j;
        src_used[best_i] = true;
        tgt_used[best_j] = true;
    }

    std::vector<std::uint32_t> tgt_assign(g_t.entity_count());
    std::vector<int> tgt_part_to_batch(k, 0);
    for (int i = 0; i < k; ++i) tgt_part_to_batch[match[i]] = i;
    for (EntityId e = 0; e < tgt_assign.size(); ++e) {
        tgt_assign[e] = static_cast<std::uint32_t>(tgt_part_to_batch[pt.assignment[e]]);
    }
    return batches_from_assignments(g_s, g_t, ps.assignment, tgt_assign, k, seeds);
}

std::vector<MiniBatch> expand_overlap(const std::vector<MiniBatch>& batches,
                                      const SeedAlignment& seeds, const OverlapConfig& cfg) {
    const int k = static_cast<int>(batches.size());
    if (cfg.d_ov < 1 || cfg.d_ov > k) {
        throw std::invalid_argument("expand_overlap: d_ov out of range");
    }
    if (cfg.d_ov == 1) return batches;

    std::vector<std::unordered_set<EntityId>> src_sets(k), tgt_sets(k);
    for (int i = 0; i < k; ++i) {
        src_sets[i].insert(batches[i].source.entities.begin(), batches[i].source.entities.end());
        tgt_sets[i].insert(batches[i].target.entities.begin(), batches[i].target.entities.end());
    }
    std::vector<std::vector<std::size_t>> sim(k, std::vector<std::size_t>(k, 0));
    for (const auto& [s, t] : seeds.pairs) {
        for (int i = 0; i < k; ++i) {
            if (!src_sets[i].count(s)) continue;
            for (int j = 0; j < k; ++j) {
                if (tgt_sets[j].count(t)) sim[i][j] += 1;
            }
        }
    }

    std::vector<MiniBatch> out(k);
    for (int i = 0; i < k; ++i) {
        std::vector<int> others;
        for (int j = 0; j < k; ++j) {
            if (j != i) others.push_back(j);
        }
        std::stable_sort(others.begin(), others.end(),
                         [&](int a, int b) { return sim[i][a] > sim[i][b]; });
        others.resize(cfg.d_ov - 1);

        std::set<EntityId> src_union(batches[i].source.entities.begin(),
                                     batches[i].source.entities.end());
        std::set<EntityId> tgt_union(batches[i].target.entities.begin(),
                                     batches[i].target.entities.end());
        std::set<Triple> src_triples(batches[i].source.triples.begin(),
                                     batches[i].source.triples.end());
        std::set<Triple> tgt_triples(batches[i].target.triples.begin(),
                                     batches[i].target.triples.end());
        for (int j : others) {
            src_union.insert(batches[j].source.entities.begin(), batches[j].source.entities.end());
            tgt_union.insert(batches[j].target.entities.begin(), batches[j].target.entities.end());
            src_triples.insert(batches[j].source.triples.begin(), batches[j].source.triples.end());
            tgt_triples.insert(batches[j].target.triples.begin(), batches[j].target.triples.end());
        }
        out[i].index = i;
        out[i].source.entities.assign(src_union.begin(), src_union.end());
        out[i].source.triples.assign(src_triples.begin(), src_triples.end());
        out[i].target.entities.assign(tgt_union.begin(), tgt_union.end());
        out[i].target.triples.assign(tgt_triples.begin(), tgt_triples.end());
        out[i].local_seeds = restrict_seeds(seeds, out[i].source.entities, out[i].target.entities);
    }
    return out;
}

double seed_colocation_rate(const std::vector<MiniBatch>& batches, const SeedAlignment& truth) {
    if (truth.empty()) throw std::invalid_argument("seed_colocation_rate: no pairs");
    std::unordered_map<EntityId, std::vector<int>> src_batches, tgt_batches;
    for (const auto& b : batches) {
        for (const EntityId e : b.source.entities) src_batches[e].push_back(b.index);
        for (const EntityId e : b.target.entities) tgt_batches[e].push_back(b.index);
    }
    std::size_t together = 0;
    for (const auto& [s, t] : truth.pairs) {
        auto si = src_batches.find(s);
        auto ti = tgt_batches.find(t);
        if (si == src_batches.end() || ti == tgt_batches.end()) continue;
        bool hit = false;
        for (int bs : si->second) {
            for (int bt : ti->second) {
                if (bs == bt) {
                    hit = true;
                    break;
                }
            }
            if (hit) break;
        }
        if (hit) ++together;
    }
    return static_cast<double>(together) / static_cast<double>(truth.size());
}

void save_batch_assignment(const std::string& path, const std::vector<MiniBatch>& batches,
                           const KnowledgeGraph& g_s, const KnowledgeGraph& g_t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write batch assignment: " + path);
    for (const auto& b : batches) {
        for (const EntityId e : b.source.entities) {
            out << g_s.entities.label(e) << "\tS\t" << b.index << '\n';
        }
        for (const EntityId e : b.target.entities) {
            out << g_t.entities.label(e) << "\tT\t" << b.index << '\n';
        }
    }
}

std::vector<MiniBatch> load_batch_assignment(const std::string& path, const KnowledgeGraph& g_s,
                                             const KnowledgeGraph& g_t,
                                             const SeedAlignment& seeds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open batch assignment: " + path);
    std::map<int, std::vector<EntityId>> src_parts, tgt_parts;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos) {
            throw std::runtime_error("malformed assignment line: " + line);
        }
        const std::string label = line.substr(0, tab1);
        const std::string side = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const int batch = std::stoi(line.substr(tab2 + 1));
        if (side == "S") {
            auto id = g_s.entities.find(label);
            if (!id) throw std::runtime_error("assignment references unknown source entity: " + label);
            src_parts[batch].push_back(*id);
        } else if (side == "T") {
            auto id = g_t.entities.find(label);
            if (!id) throw std::runtime_error("assignment references unknown target entity: " + label);
            tgt_parts[batch].push_back(*id);
        } else {
            throw std::runtime_error("assignment side must be S or T: " + line);
        }
    }
    std::vector<MiniBatch> batches;
    for (const auto& [index, src] : src_parts) {
        MiniBatch b;
        b.index = index;
        b.source = induce_subgraph(g_s, src);
        auto it = tgt_parts.find(index);
        if (it != tgt_parts.end()) b.target = induce_subgraph(g_t, it->second);
        b.local_seeds = restrict_seeds(seeds, b.source.entities, b.target.entities);
        batches.push_back(std::move(b));
    }
    return batches;
}

}  // namespace kgalign
