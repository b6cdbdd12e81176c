#include "kgalign/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace kgalign {

namespace {

const char* kConsonants = "bcdfghklmnprstvz";
const char* kVowels = "aeiou";

std::string random_word(Rng& rng) {
    const int syllables = 2 + static_cast<int>(rng.index(2));
    std::string word;
    for (int i = 0; i < syllables; ++i) {
        word.push_back(kConsonants[rng.index(16)]);
        word.push_back(kVowels[rng.index(5)]);
    }
    return word;
}

std::string random_name(Rng& rng, std::unordered_set<std::string>& used) {
    while (true) {
        std::string name = random_word(rng);
        name += ' ';
        name += random_word(rng);
        name += ' ';
        name += random_word(rng);
        if (used.insert(name).second) return name;
    }
}

// Light perturbation: one or two character edits.
std::string char_edits(const std::string& name, Rng& rng) {
    std::string out = name;
    const int edits = 1 + static_cast<int>(rng.index(2));
    for (int i = 0; i < edits && !out.empty(); ++i) {
        const std::size_t pos = rng.index(out.size());
        switch (rng.index(3)) {
            case 0:
                out[pos] = kConsonants[rng.index(16)];
                break;
            case 1:
                out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), kVowels[rng.index(5)]);
                break;
            default:
                if (out.size() > 1) out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
                break;
        }
    }
    return out;
}

// Heavy perturbation: a whole token is replaced, plus character edits.
std::string token_replace(const std::string& name, Rng& rng) {
    std::vector<std::string> tokens;
    std::string token;
    for (const char c : name) {
        if (c == ' ') {
            if (!token.empty()) tokens.push_back(token);
            token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) tokens.push_back(token);
    if (!tokens.empty()) tokens[rng.index(tokens.size())] = random_word(rng);
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return char_edits(out, rng);
}

std::string perturb_name(const std::string& name, Rng& rng,
                         std::unordered_set<std::string>& used) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        // Half the noised names lose a whole token (heavy), half get light
        // character edits; a handful are replaced outright.
        std::string candidate;
        const double roll = rng.real();
        if (roll < 0.15) {
            candidate = random_word(rng) + ' ' + random_word(rng) + ' ' + random_word(rng);
        } else if (roll < 0.55) {
            candidate = token_replace(name, rng);
        } else {
            candidate = char_edits(name, rng);
        }
        if (candidate != name && used.insert(candidate).second) return candidate;
    }
    throw std::runtime_error("perturb_name: could not produce a unique perturbation");
}

struct Edge {
    std::uint32_t u, v;
    std::uint32_t rel;
    bool forward;
};

}  // namespace

SyntheticBenchmark generate_synthetic_benchmark(const SyntheticSpec& spec) {
    const int n = spec.entities_per_side;
    if (n < 2) throw std::invalid_argument("synthetic: need at least 2 entities per side");
    if (spec.avg_degree >= n) throw std::invalid_argument("synthetic: avg_degree >= entity count");
    if (spec.community_count < 1 || spec.community_count > n) {
        throw std::invalid_argument("synthetic: invalid community count");
    }
    for (const double ratio : {spec.name_noise, spec.structure_noise, spec.unknown_entity_ratio}) {
        if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("synthetic: ratio out of range");
    }

    Rng rng(spec.rng_seed);
    const int communities = spec.community_count;
    auto community_of = [&](int e) { return static_cast<int>(static_cast<long long>(e) * communities / n); };
    std::vector<std::vector<std::uint32_t>> members(communities);
    for (int e = 0; e < n; ++e) members[community_of(e)].push_back(static_cast<std::uint32_t>(e));

    std::unordered_set<std::string> used_names;
    std::vector<std::string> src_names(n);
    for (int e = 0; e < n; ++e) src_names[e] = random_name(rng, used_names);

    const int relations = 24;
    auto random_rel = [&] { return static_cast<std::uint32_t>(rng.index(relations)); };

    // Intra-community rings guarantee every entity has edges, then random
    // extras with 90% intra-community bias.
    std::vector<Edge> edges;
    std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set;
    auto add_edge = [&](std::uint32_t u, std::uint32_t v) {
        if (u == v) return false;
        const auto key = std::minmax(u, v);
        if (!edge_set.insert({key.first, key.second}).second) return false;
        edges.push_back({u, v, random_rel(), rng.chance(0.5)});
        return true;
    };
    for (const auto& group : members) {
        if (group.size() < 2) continue;
        for (std::size_t i = 0; i < group.size(); ++i) {
            add_edge(group[i], group[(i + 1) % group.size()]);
        }
    }
    const std::size_t edge_target =
        std::max<std::size_t>(edges.size(), static_cast<std::size_t>(n * spec.avg_degree / 2.0));
    std::size_t guard = edge_target * 50 + 1000;
    while (edges.size() < edge_target && guard-- > 0) {
        const auto u = static_cast<std::uint32_t>(rng.index(n));
        std::uint32_t v;
        if (rng.chance(0.9)) {
            const auto& group = members[community_of(static_cast<int>(u))];
            v = group[rng.index(group.size())];
        } else {
            v = static_cast<std::uint32_t>(rng.index(n));
        }
        add_edge(u, v);
    }

    // Target side: copy, rewire a fraction of edges, perturb a fraction of
    // names, inject unknown entities anchored to known ones.
    std::vector<Edge> tgt_edges = edges;
    const std::size_t rewired = static_cast<std::size_t>(std::llround(spec.structure_noise *
                                                                      static_cast<double>(tgt_edges.size())));
    std::vector<std::size_t> order(tgt_edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::set<std::pair<std::uint32_t, std::uint32_t>> tgt_edge_set = edge_set;
    for (std::size_t i = 0; i < rewired; ++i) {
        Edge& e = tgt_edges[order[i]];
        const auto key = std::minmax(e.u, e.v);
        tgt_edge_set.erase({key.first, key.second});
        for (int attempt = 0; attempt < 50; ++attempt) {
            Edge candidate = e;
            const auto replacement = static_cast<std::uint32_t>(rng.index(n));
            if (rng.chance(0.5)) {
                candidate.u = replacement;
            } else {
                candidate.v = replacement;
            }
            if (candidate.u == candidate.v) continue;
            const auto ckey = std::minmax(candidate.u, candidate.v);
            if (tgt_edge_set.count({ckey.first, ckey.second})) continue;
            tgt_edge_set.insert({ckey.first, ckey.second});
            e = candidate;
            break;
        }
    }

    std::vector<std::string> tgt_names = src_names;
    const std::size_t noised =
        static_cast<std::size_t>(std::llround(spec.name_noise * static_cast<double>(n)));
    std::vector<std::uint32_t> name_order(n);
    for (int i = 0; i < n; ++i) name_order[i] = static_cast<std::uint32_t>(i);
    rng.shuffle(name_order);
    for (std::size_t i = 0; i < noised; ++i) {
        tgt_names[name_order[i]] = perturb_name(src_names[name_order[i]], rng, used_names);
    }

    const int unknowns =
        static_cast<int>(std::llround(spec.unknown_entity_ratio * static_cast<double>(n)));
    std::vector<std::string> unknown_names;
    for (int i = 0; i < unknowns; ++i) {
        unknown_names.push_back(random_name(rng, used_names));
        const std::uint32_t uid = static_cast<std::uint32_t>(n + i);
        const auto& group = members[rng.index(communities)];
        const int anchors = std::min<int>(spec.min_anchors, static_cast<int>(group.size()));
        std::vector<std::uint32_t> pool = group;
        rng.shuffle(pool);
        for (int a = 0; a < anchors; ++a) {
            tgt_edges.push_back({uid, pool[a], random_rel(), rng.chance(0.5)});
        }
    }

    // Degree patch: rewiring may have stranded an entity; reconnect it inside
    // its community.
    {
        std::vector<int> degree(n + unknowns, 0);
        for (const auto& e : tgt_edges) {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        for (int e = 0; e < n; ++e) {
            if (degree[e] > 0) continue;
            const auto& group = members[community_of(e)];
            std::uint32_t other = group[rng.index(group.size())];
            if (other == static_cast<std::uint32_t>(e)) other = static_cast<std::uint32_t>((e + 1) % n);
            tgt_edges.push_back({static_cast<std::uint32_t>(e), other, random_rel(), rng.chance(0.5)});
        }
    }

    auto to_triples = [&](const std::vector<Edge>& list, const std::vector<std::string>& names,
                          const std::vector<std::string>& extra_names) {
        std::vector<LabeledTriple> triples;
        triples.reserve(list.size());
        auto name_of = [&](std::uint32_t id) -> const std::string& {
            return id < names.size() ? names[id] : extra_names[id - names.size()];
        };
        for (const auto& e : list) {
            const std::string rel = "r" + std::to_string(e.rel);
            if (e.forward) {
                triples.push_back({name_of(e.u), rel, name_of(e.v)});
            } else {
                triples.push_back({name_of(e.v), rel, name_of(e.u)});
            }
        }
        return triples;
    };

    SyntheticBenchmark bench;
    bench.source = build_graph(to_triples(edges, src_names, {}));
    bench.target = build_graph(to_triples(tgt_edges, tgt_names, unknown_names));

    std::vector<std::pair<EntityId, EntityId>> truth_pairs;
    truth_pairs.reserve(n);
    for (int e = 0; e < n; ++e) {
        const auto s = bench.source.entities.find(src_names[e]);
        const auto t = bench.target.entities.find(tgt_names[e]);
        if (s && t) truth_pairs.emplace_back(*s, *t);
    }
    bench.truth = make_seed_alignment(std::move(truth_pairs), SeedKind::GroundTruth);
    return bench;
}

std::pair<SeedAlignment, SeedAlignment> split_seed_alignment(const SeedAlignment& truth,
                                                             double ratio, std::uint64_t rng_seed) {
    if (ratio <= 0.0 || ratio >= 1.0) {
        throw std::invalid_argument("split_seed_alignment: ratio must be in (0,1)");
    }
    auto pairs = truth.pairs;
    Rng rng(rng_seed);
    rng.shuffle(pairs);
    const std::size_t cut = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pairs.size())));
    SeedAlignment train, test;
    train.kind = SeedKind::TrainSeed;
    test.kind = SeedKind::GroundTruth;
    train.pairs.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(cut));
    test.pairs.assign(pairs.begin() + static_cast<std::ptrdiff_t>(cut), pairs.end());
    return {std::move(train), std::move(test)};
}

}  // namespace kgalign
