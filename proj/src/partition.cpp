#include "kgalign/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kgalign {

std::size_t part_capacity(std::size_t n, int k, double imbalance) {
    const std::size_t target = (n + k - 1) / k;
    return static_cast<std::size_t>((1.0 + imbalance) * static_cast<double>(target) + 1e-9);
}

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

// One heavy-edge-matching round. Returns the coarse graph and the fine->coarse map.
std::pair<WeightedGraph, std::vector<std::uint32_t>> coarsen_once(const WeightedGraph& g, Rng& rng,
                                                                  std::size_t max_vertex_weight) {
    const std::uint32_t n = g.n;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<std::uint32_t> match(n, kUnset);
    for (std::uint32_t v : order) {
        if (match[v] != kUnset) continue;
        std::uint32_t best = kUnset;
        double best_w = 0.0;
        for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
            const std::uint32_t u = g.adj[e];
            const double w = g.wgt[e];
            if (u == v || match[u] != kUnset || w <= 0.0) continue;
            if (g.vwgt[v] + g.vwgt[u] > max_vertex_weight) continue;
            if (w > best_w || (w == best_w && (best == kUnset || u < best))) {
                best = u;
                best_w = w;
            }
        }
        if (best != kUnset) {
            match[v] = best;
            match[best] = v;
        } else {
            match[v] = v;
        }
    }

    std::vector<std::uint32_t> coarse_map(n, kUnset);
    std::uint32_t nc = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (coarse_map[v] != kUnset) continue;
        coarse_map[v] = nc;
        if (match[v] != v) coarse_map[match[v]] = nc;
        ++nc;
    }

    WeightedGraph coarse;
    coarse.n = nc;
    coarse.vwgt.assign(nc, 0);
    for (std::uint32_t v = 0; v < n; ++v) coarse.vwgt[coarse_map[v]] += g.vwgt[v];

    // Aggregate edges with a dense scratch accumulator.
    coarse.xadj.assign(nc + 1, 0);
    std::vector<double> acc(nc, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(nc);
    std::vector<std::vector<std::uint32_t>> members(nc);
    for (std::uint32_t v = 0; v < n; ++v) members[coarse_map[v]].push_back(v);
    for (std::uint32_t cv = 0; cv < nc; ++cv) {
        touched.clear();
        for (std::uint32_t v : members[cv]) {
            for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
                const std::uint32_t cu = coarse_map[g.adj[e]];
                if (cu == cv) continue;
                if (acc[cu] == 0.0 && std::find(touched.begin(), touched.end(), cu) == touched.end()) {
                    touched.push_back(cu);
                }
                acc[cu] += g.wgt[e];
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& row = rows[cv];
        row.reserve(touched.size());
        for (std::uint32_t cu : touched) {
            row.emplace_back(cu, acc[cu]);
            acc[cu] = 0.0;
        }
    }
    std::size_t total = 0;
    for (std::uint32_t cv = 0; cv < nc; ++cv) {
        coarse.xadj[cv] = total;
        total += rows[cv].size();
    }
    coarse.xadj[nc] = total;
    coarse.adj.resize(total);
    coarse.wgt.resize(total);
    for (std::uint32_t cv = 0; cv < nc; ++cv) {
        std::size_t off = coarse.xadj[cv];
        for (const auto& [cu, w] : rows[cv]) {
            coarse.adj[off] = cu;
            coarse.wgt[off] = w;
            ++off;
        }
    }
    return {std::move(coarse), std::move(coarse_map)};
}

std::vector<std::uint32_t> pick_spread_seeds(const WeightedGraph& g, int k, Rng& rng) {
    const std::uint32_t n = g.n;
    std::vector<std::uint32_t> seeds;
    seeds.push_back(static_cast<std::uint32_t>(rng.index(n)));
    std::vector<std::uint32_t> dist(n);
    constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
    while (static_cast<int>(seeds.size()) < k) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::deque<std::uint32_t> queue;
        for (std::uint32_t s : seeds) {
            dist[s] = 0;
            queue.push_back(s);
        }
        while (!queue.empty()) {
            const std::uint32_t v = queue.front();
            queue.pop_front();
            for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
                const std::uint32_t u = g.adj[e];
                if (dist[u] == kInf) {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        std::uint32_t best = kUnset;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (std::find(seeds.begin(), seeds.end(), v) != seeds.end()) continue;
            if (best == kUnset || dist[v] > dist[best]) best = v;
        }
        seeds.push_back(best);
    }
    return seeds;
}

std::vector<std::uint32_t> grow_regions(const WeightedGraph& g, int k, std::size_t cap, Rng& rng) {
    const std::uint32_t n = g.n;
    std::vector<std::uint32_t> assign(n, kUnset);
    std::vector<std::size_t> load(k, 0);
    std::vector<std::deque<std::uint32_t>> queue(k);

    const auto seeds = pick_spread_seeds(g, k, rng);
    for (int p = 0; p < k; ++p) {
        assign[seeds[p]] = static_cast<std::uint32_t>(p);
        load[p] += g.vwgt[seeds[p]];
        for (std::size_t e = g.xadj[seeds[p]]; e < g.xadj[seeds[p] + 1]; ++e) {
            queue[p].push_back(g.adj[e]);
        }
    }

    std::size_t assigned = static_cast<std::size_t>(k);
    std::uint32_t scan = 0;  // cursor for stealing unassigned vertices
    while (assigned < n) {
        int p = -1;
        for (int q = 0; q < k; ++q) {
            if (queue[q].empty()) continue;
            if (p == -1 || load[q] < load[p]) p = q;
        }
        if (p == -1) {
            // All frontiers exhausted (disconnected component or capacity
            // drops): place the next unassigned vertex in the lightest part.
            while (scan < n && assign[scan] != kUnset) ++scan;
            if (scan >= n) break;
            int lightest = 0;
            for (int q = 1; q < k; ++q) {
                if (load[q] < load[lightest]) lightest = q;
            }
            assign[scan] = static_cast<std::uint32_t>(lightest);
            load[lightest] += g.vwgt[scan];
            ++assigned;
            for (std::size_t e = g.xadj[scan]; e < g.xadj[scan + 1]; ++e) {
                if (assign[g.adj[e]] == kUnset) queue[lightest].push_back(g.adj[e]);
            }
            continue;
        }
        const std::uint32_t v = queue[p].front();
        queue[p].pop_front();
        if (assign[v] != kUnset) continue;
        if (load[p] + g.vwgt[v] > cap) continue;  // leave for another part or the sweep
        assign[v] = static_cast<std::uint32_t>(p);
        load[p] += g.vwgt[v];
        ++assigned;
        for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
            if (assign[g.adj[e]] == kUnset) queue[p].push_back(g.adj[e]);
        }
    }

    // Sweep: anything still unassigned goes to the least-loaded part.
    for (std::uint32_t v = 0; v < n; ++v) {
        if (assign[v] != kUnset) continue;
        int best = 0;
        for (int q = 1; q < k; ++q) {
            if (load[q] < load[best]) best = q;
        }
        assign[v] = static_cast<std::uint32_t>(best);
        load[best] += g.vwgt[v];
    }
    return assign;
}

// Boundary refinement: balance enforcement followed by positive-gain
// single-vertex moves, capacity-respecting, parts never emptied.
void refine(const WeightedGraph& g, std::vector<std::uint32_t>& assign, int k, std::size_t cap) {
    const std::uint32_t n = g.n;
    std::vector<std::size_t> load(k, 0);
    std::vector<std::size_t> count(k, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        load[assign[v]] += g.vwgt[v];
        count[assign[v]] += 1;
    }

    std::vector<double> conn(k, 0.0);
    auto connection = [&](std::uint32_t v) {
        std::fill(conn.begin(), conn.end(), 0.0);
        for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
            conn[assign[g.adj[e]]] += g.wgt[e];
        }
    };

    // Balance pass: move vertices out of overloaded parts, least cut damage first.
    std::size_t guard = 4 * static_cast<std::size_t>(n) + 16;
    while (guard-- > 0) {
        int over = -1;
        for (int p = 0; p < k; ++p) {
            if (load[p] > cap && (over == -1 || load[p] > load[over])) over = p;
        }
        if (over == -1) break;
        std::uint32_t best_v = kUnset;
        int best_p = -1;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::uint32_t v = 0; v < n; ++v) {
            if (assign[v] != static_cast<std::uint32_t>(over)) continue;
            if (count[over] <= 1) break;
            connection(v);
            for (int p = 0; p < k; ++p) {
                if (p == over || load[p] + g.vwgt[v] > cap) continue;
                const double gain = conn[p] - conn[over];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_v = v;
                    best_p = p;
                }
            }
        }
        if (best_v == kUnset) break;  // no feasible move (oversized coarse vertex)
        load[over] -= g.vwgt[best_v];
        count[over] -= 1;
        load[best_p] += g.vwgt[best_v];
        count[best_p] += 1;
        assign[best_v] = static_cast<std::uint32_t>(best_p);
    }

    // Gain passes.
    for (int pass = 0; pass < 8; ++pass) {
        bool moved = false;
        for (std::uint32_t v = 0; v < n; ++v) {
            const std::uint32_t a = assign[v];
            if (count[a] <= 1) continue;
            bool boundary = false;
            for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1] && !boundary; ++e) {
                boundary = assign[g.adj[e]] != a;
            }
            if (!boundary) continue;
            connection(v);
            int best_p = -1;
            double best_gain = 0.0;
            for (int p = 0; p < k; ++p) {
                if (p == static_cast<int>(a) || load[p] + g.vwgt[v] > cap) continue;
                const double gain = conn[p] - conn[a];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_p = p;
                }
            }
            if (best_p >= 0) {
                load[a] -= g.vwgt[v];
                count[a] -= 1;
                load[best_p] += g.vwgt[v];
                count[best_p] += 1;
                assign[v] = static_cast<std::uint32_t>(best_p);
                moved = true;
            }
        }
        if (!moved) break;
    }
}

}  // namespace

WeightedGraph to_weighted(const KnowledgeGraph& g) {
    WeightedGraph out;
    out.n = static_cast<std::uint32_t>(g.entity_count());
    out.xadj.assign(out.n + 1, 0);
    out.vwgt.assign(out.n, 1);
    std::size_t total = 0;
    for (std::uint32_t v = 0; v < out.n; ++v) {
        out.xadj[v] = total;
        total += g.adjacency[v].size();
    }
    out.xadj[out.n] = total;
    out.adj.resize(total);
    out.wgt.resize(total);
    std::size_t off = 0;
    for (std::uint32_t v = 0; v < out.n; ++v) {
        for (const auto& e : g.adjacency[v]) {
            out.adj[off] = e.neighbor;
            out.wgt[off] = e.weight;
            ++off;
        }
    }
    return out;
}

WeightedGraph weighted_from_edges(
    std::uint32_t n, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges) {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (const auto& [u, v, w] : edges) {
        if (u >= n || v >= n) throw std::out_of_range("weighted_from_edges: vertex out of range");
        if (u == v) continue;
        rows[u].emplace_back(v, w);
        rows[v].emplace_back(u, w);
    }
    for (auto& row : rows) {
        std::sort(row.begin(), row.end());
        std::vector<std::pair<std::uint32_t, double>> merged;
        for (const auto& [v, w] : row) {
            if (!merged.empty() && merged.back().first == v) {
                merged.back().second += w;
            } else {
                merged.emplace_back(v, w);
            }
        }
        row = std::move(merged);
    }
    WeightedGraph out;
    out.n = n;
    out.vwgt.assign(n, 1);
    out.xadj.assign(n + 1, 0);
    std::size_t total = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        out.xadj[v] = total;
        total += rows[v].size();
    }
    out.xadj[n] = total;
    out.adj.resize(total);
    out.wgt.resize(total);
    std::size_t off = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        for (const auto& [u, w] : rows[v]) {
            out.adj[off] = u;
            out.wgt[off] = w;
            ++off;
        }
    }
    return out;
}

std::vector<std::size_t> Partition::part_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto p : assignment) sizes.at(p) += 1;
    return sizes;
}

std::size_t Partition::capacity(std::size_t n) const { return part_capacity(n, k, imbalance); }

Partition partition_kway(const WeightedGraph& g, int k, double imbalance, std::uint64_t rng_seed) {
    if (k < 1) throw std::invalid_argument("partition_kway: K must be >= 1");
    if (static_cast<std::size_t>(k) > g.n) {
        throw std::invalid_argument("partition_kway: K exceeds vertex count");
    }

    Partition result;
    result.k = k;
    result.imbalance = imbalance;
    if (k == 1) {
        result.assignment.assign(g.n, 0);
        return result;
    }

    Rng rng(rng_seed);
    const std::size_t n_total = g.n;
    const std::size_t cap = part_capacity(n_total, k, imbalance);
    const std::size_t coarse_target = std::max<std::size_t>(200, 20 * static_cast<std::size_t>(k));
    const std::size_t max_vertex_weight = std::max<std::size_t>(1, (n_total + k - 1) / k);

    std::vector<WeightedGraph> levels;
    std::vector<std::vector<std::uint32_t>> maps;
    levels.push_back(g);
    if (levels.back().vwgt.empty()) levels.back().vwgt.assign(g.n, 1);

    while (levels.back().n > coarse_target) {
        auto [coarse, map] = coarsen_once(levels.back(), rng, max_vertex_weight);
        if (coarse.n >= levels.back().n * 9 / 10) break;  // matching stalled
        levels.push_back(std::move(coarse));
        maps.push_back(std::move(map));
    }

    std::vector<std::uint32_t> assign = grow_regions(levels.back(), k, cap, rng);
    refine(levels.back(), assign, k, cap);

    for (std::size_t level = levels.size() - 1; level > 0; --level) {
        const auto& map = maps[level - 1];
        std::vector<std::uint32_t> finer(levels[level - 1].n);
        for (std::uint32_t v = 0; v < levels[level - 1].n; ++v) finer[v] = assign[map[v]];
        assign = std::move(finer);
        refine(levels[level - 1], assign, k, cap);
    }

    result.assignment = std::move(assign);
    return result;
}

Partition partition_kway(const KnowledgeGraph& g, int k, double imbalance, std::uint64_t rng_seed) {
    return partition_kway(to_weighted(g), k, imbalance, rng_seed);
}

double weighted_cut(const WeightedGraph& g, const std::vector<std::uint32_t>& assignment) {
    if (assignment.size() != g.n) throw std::invalid_argument("weighted_cut: assignment size mismatch");
    double cut = 0.0;
    for (std::uint32_t v = 0; v < g.n; ++v) {
        for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
            const std::uint32_t u = g.adj[e];
            if (u > v && assignment[u] != assignment[v]) cut += g.wgt[e];
        }
    }
    return cut;
}

double edge_cut_rate(const KnowledgeGraph& g, const Partition& p) {
    if (p.assignment.size() != g.entity_count()) {
        throw std::invalid_argument("edge_cut_rate: partition does not cover graph");
    }
    std::size_t total = 0;
    std::size_t cut = 0;
    for (std::uint32_t v = 0; v < g.entity_count(); ++v) {
        for (const auto& e : g.adjacency[v]) {
            if (e.neighbor <= v) continue;
            ++total;
            if (p.assignment[v] != p.assignment[e.neighbor]) ++cut;
        }
    }
    if (total == 0) return 0.0;
    return static_cast<double>(cut) / static_cast<double>(total);
}

}  // namespace kgalign
