#include "kgalign/name.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "kgalign/parallel.hpp"

namespace kgalign {

namespace {

constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mod_mersenne(std::uint64_t a, std::uint64_t x, std::uint64_t b) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * x + b;
    std::uint64_t lo = static_cast<std::uint64_t>(prod & kMersenne61);
    std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
    std::uint64_t r = lo + hi;
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

std::u32string decode_utf8(const std::string& s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
            cp = static_cast<char32_t>((c & 0x1f) << 6 | (s[i + 1] & 0x3f));
            len = 2;
        } else if ((c >> 4) == 0xe && i + 2 < s.size()) {
            cp = static_cast<char32_t>((c & 0x0f) << 12 | (s[i + 1] & 0x3f) << 6 | (s[i + 2] & 0x3f));
            len = 3;
        } else if ((c >> 3) == 0x1e && i + 3 < s.size()) {
            cp = static_cast<char32_t>((c & 0x07) << 18 | (s[i + 1] & 0x3f) << 12 |
                                       (s[i + 2] & 0x3f) << 6 | (s[i + 3] & 0x3f));
            len = 4;
        } else {
            cp = 0xfffd;  // invalid byte, consume one
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

// Smallest-phi selection by (distance asc, target asc).
struct Candidate {
    double dist;
    EntityId target;
    bool operator<(const Candidate& other) const {
        if (dist != other.dist) return dist < other.dist;
        return target < other.target;
    }
};

void keep_best(std::vector<Candidate>& cands, int phi) {
    if (static_cast<int>(cands.size()) <= phi) {
        std::sort(cands.begin(), cands.end());
        return;
    }
    std::nth_element(cands.begin(), cands.begin() + phi - 1, cands.end());
    cands.resize(phi);
    std::sort(cands.begin(), cands.end());
}

}  // namespace

std::vector<std::string> tokenize_name(const std::string& name) {
    std::string cleaned;
    cleaned.reserve(name.size());
    for (const char raw : name) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (c < 0x80 && std::ispunct(c)) {
            cleaned.push_back(' ');
        } else if (c < 0x80) {
            cleaned.push_back(static_cast<char>(std::tolower(c)));
        } else {
            cleaned.push_back(raw);
        }
    }
    std::vector<std::string> tokens;
    std::istringstream stream(cleaned);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

NameEmbedder NameEmbedder::hashing(int dim) {
    if (dim < 1) throw std::invalid_argument("NameEmbedder: dim must be >= 1");
    return NameEmbedder(EmbedderMode::HashingFallback, dim);
}

NameEmbedder NameEmbedder::from_token_vectors(
    std::unordered_map<std::string, Eigen::VectorXd> vectors, int dim) {
    if (dim < 1) throw std::invalid_argument("NameEmbedder: dim must be >= 1");
    NameEmbedder e(EmbedderMode::FileBacked, dim);
    for (const auto& [token, vec] : vectors) {
        if (vec.size() != dim) {
            throw std::invalid_argument("NameEmbedder: vector dim mismatch for token " + token);
        }
    }
    e.token_vectors_ = std::move(vectors);
    return e;
}

NameEmbedder NameEmbedder::from_token_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open token vector file: " + path);
    std::unordered_map<std::string, Eigen::VectorXd> vectors;
    std::string line;
    int dim = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw std::runtime_error("malformed token vector line: " + line);
        const std::string token = line.substr(0, tab);
        std::istringstream values(line.substr(tab + 1));
        std::vector<double> row;
        double v = 0.0;
        while (values >> v) row.push_back(v);
        if (dim < 0) dim = static_cast<int>(row.size());
        if (dim == 0 || static_cast<int>(row.size()) != dim) {
            throw std::runtime_error("inconsistent token vector width in " + path);
        }
        Eigen::VectorXd vec(dim);
        for (int d = 0; d < dim; ++d) vec(d) = row[d];
        vectors.emplace(token, std::move(vec));
    }
    if (dim <= 0) throw std::runtime_error("token vector file is empty: " + path);
    return from_token_vectors(std::move(vectors), dim);
}

Eigen::VectorXd NameEmbedder::token_vector(const std::string& token) const {
    if (mode_ == EmbedderMode::FileBacked) {
        auto it = token_vectors_.find(token);
        if (it == token_vectors_.end()) return Eigen::VectorXd();  // unknown token, skipped
        return it->second;
    }
    // Character trigrams hashed into dim buckets with signed counts.
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(dim_);
    auto add_gram = [&](std::string_view gram) {
        const std::uint64_t h = mix64(fnv1a64(gram));
        const int bucket = static_cast<int>(h % static_cast<std::uint64_t>(dim_));
        const double sign = (h >> 63) ? -1.0 : 1.0;
        vec(bucket) += sign;
    };
    if (token.size() < 3) {
        add_gram(token);
    } else {
        for (std::size_t i = 0; i + 3 <= token.size(); ++i) {
            add_gram(std::string_view(token).substr(i, 3));
        }
    }
    return vec;
}

Eigen::VectorXd NameEmbedder::embed(const std::string& name) const {
    const auto tokens = tokenize_name(name);
    Eigen::VectorXd pooled;
    bool any = false;
    for (const auto& token : tokens) {
        Eigen::VectorXd vec = token_vector(token);
        if (vec.size() == 0) continue;
        if (!any) {
            pooled = vec;
            any = true;
        } else {
            pooled = pooled.cwiseMax(vec);
        }
    }
    if (!any) {
        std::cerr << "[kgalign] warning: name '" << name << "' produced no token vectors\n";
        return Eigen::VectorXd::Zero(dim_);
    }
    return pooled / (pooled.norm() + epsilon_);
}

EmbeddingTable NameEmbedder::embed_all(const std::vector<std::string>& names) const {
    EmbeddingTable table(names.size(), dim_);
    for (std::size_t i = 0; i < names.size(); ++i) {
        table.vectors.row(i) = embed(names[i]).transpose();
    }
    return table;
}

TopKSimilarityMatrix semantic_topk(const EmbeddingTable& src, const EmbeddingTable& tgt,
                                   const NffConfig& cfg) {
    if (src.dim() != tgt.dim()) throw std::invalid_argument("semantic_topk: dim mismatch");
    const std::size_t n_src = src.size();
    const std::size_t n_tgt = tgt.size();
    const int phi = std::min<int>(cfg.phi, static_cast<int>(n_tgt));
    if (phi < 1) throw std::invalid_argument("semantic_topk: phi must be >= 1");
    const int segments = std::max(1, std::min<int>(cfg.segments, static_cast<int>(n_tgt)));
    const std::size_t seg_len = (n_tgt + segments - 1) / segments;

    std::vector<std::vector<Candidate>> kept(n_src);
    parallel_for(n_src, resolve_workers(cfg.workers), [&](std::size_t begin, std::size_t end) {
        std::vector<Candidate> merged;
        std::vector<Candidate> seg_cands;
        for (std::size_t r = begin; r < end; ++r) {
            merged.clear();
            for (int seg = 0; seg < segments; ++seg) {
                const std::size_t t0 = static_cast<std::size_t>(seg) * seg_len;
                if (t0 >= n_tgt) break;
                const std::size_t len = std::min(seg_len, n_tgt - t0);
                const Eigen::VectorXd dist =
                    (tgt.vectors.middleRows(t0, len).rowwise() - src.vectors.row(r))
                        .cwiseAbs()
                        .rowwise()
                        .sum();
                seg_cands.clear();
                seg_cands.reserve(len);
                for (std::size_t i = 0; i < len; ++i) {
                    seg_cands.push_back({dist(static_cast<Eigen::Index>(i)),
                                         static_cast<EntityId>(t0 + i)});
                }
                keep_best(seg_cands, phi);
                merged.insert(merged.end(), seg_cands.begin(), seg_cands.end());
            }
            keep_best(merged, phi);
            kept[r] = merged;
        }
    });

    double d_min = std::numeric_limits<double>::infinity();
    double d_max = -std::numeric_limits<double>::infinity();
    for (const auto& row : kept) {
        for (const auto& c : row) {
            d_min = std::min(d_min, c.dist);
            d_max = std::max(d_max, c.dist);
        }
    }
    TopKSimilarityMatrix m(n_src, n_tgt, phi);
    if (!std::isfinite(d_min)) return m;
    const double denom = d_max - d_min + cfg.epsilon;
    for (std::size_t r = 0; r < n_src; ++r) {
        std::vector<ScoredTarget> entries;
        entries.reserve(kept[r].size());
        for (const auto& c : kept[r]) {
            entries.push_back({c.target, 1.0 - (c.dist - d_min) / denom});
        }
        m.set_row(static_cast<EntityId>(r), std::move(entries));
    }
    return m;
}

MinHasher::MinHasher(int perms) {
    if (perms < 1) throw std::invalid_argument("MinHasher: perms must be >= 1");
    Rng rng(0x5eedc0ffee123457ULL);
    mult_.resize(perms);
    add_.resize(perms);
    for (int i = 0; i < perms; ++i) {
        mult_[i] = 1 + rng.below(kMersenne61 - 1);
        add_[i] = rng.below(kMersenne61);
    }
}

std::vector<std::uint64_t> MinHasher::signature(const std::string& name) const {
    const auto tokens = tokenize_name(name);
    std::unordered_set<std::string> set(tokens.begin(), tokens.end());
    std::vector<std::uint64_t> sig(mult_.size(), kMersenne61);  // sentinel for empty sets
    if (set.empty()) return sig;
    std::vector<std::uint64_t> hashes;
    hashes.reserve(set.size());
    for (const auto& token : set) hashes.push_back(fnv1a64(token) % kMersenne61);
    for (std::size_t i = 0; i < mult_.size(); ++i) {
        std::uint64_t best = kMersenne61;
        for (const std::uint64_t x : hashes) {
            best = std::min(best, mod_mersenne(mult_[i], x, add_[i]));
        }
        sig[i] = best;
    }
    return sig;
}

double MinHasher::estimate_jaccard(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("estimate_jaccard: signature length mismatch");
    }
    std::size_t equal = 0;
    for (std::size_t i = 0; i < a.size(); ++i) equal += a[i] == b[i];
    return static_cast<double>(equal) / static_cast<double>(a.size());
}

std::pair<int, int> lsh_band_plan(int perms, double theta) {
    const double s_target = std::min(1.0, theta + 0.1);
    int best_b = -1, best_r = -1;
    double best_p = -1.0;
    for (int r = 1; r <= perms; ++r) {
        int b = perms / r;
        // Largest band count whose threshold stays >= theta - 0.05.
        const double b_cap = std::pow(std::max(theta - 0.05, 1e-6), -r);
        if (b_cap < static_cast<double>(b)) b = static_cast<int>(b_cap);
        if (b < 1) continue;
        const double threshold = std::pow(1.0 / b, 1.0 / r);
        if (std::abs(threshold - theta) > 0.05 + 1e-12) continue;
        const double p_hit = 1.0 - std::pow(1.0 - std::pow(s_target, r), b);
        if (p_hit > best_p) {
            best_p = p_hit;
            best_b = b;
            best_r = r;
        }
    }
    if (best_b < 0) {
        throw std::invalid_argument("lsh_band_plan: no banding satisfies the threshold window");
    }
    return {best_b, best_r};
}

std::vector<std::pair<EntityId, EntityId>> lsh_candidates(const std::vector<std::string>& src_names,
                                                          const std::vector<std::string>& tgt_names,
                                                          const NffConfig& cfg) {
    const MinHasher hasher(cfg.minhash_perms);
    const auto [bands, rows] = lsh_band_plan(cfg.minhash_perms, cfg.theta);

    std::vector<std::vector<std::uint64_t>> src_sigs(src_names.size()), tgt_sigs(tgt_names.size());
    const int workers = resolve_workers(cfg.workers);
    parallel_for(src_names.size(), workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) src_sigs[i] = hasher.signature(src_names[i]);
    });
    parallel_for(tgt_names.size(), workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) tgt_sigs[i] = hasher.signature(tgt_names[i]);
    });

    auto band_key = [rows = rows](const std::vector<std::uint64_t>& sig, int band) {
        std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(band);
        for (int j = 0; j < rows; ++j) {
            h ^= sig[static_cast<std::size_t>(band) * rows + j];
            h *= 0x100000001b3ULL;
        }
        return h;
    };

    std::vector<std::unordered_map<std::uint64_t, std::vector<EntityId>>> buckets(bands);
    for (EntityId s = 0; s < src_sigs.size(); ++s) {
        for (int b = 0; b < bands; ++b) buckets[b][band_key(src_sigs[s], b)].push_back(s);
    }

    std::unordered_set<std::uint64_t> seen;
    std::vector<std::pair<EntityId, EntityId>> out;
    for (EntityId t = 0; t < tgt_sigs.size(); ++t) {
        for (int b = 0; b < bands; ++b) {
            auto it = buckets[b].find(band_key(tgt_sigs[t], b));
            if (it == buckets[b].end()) continue;
            for (const EntityId s : it->second) {
                const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | t;
                if (!seen.insert(key).second) continue;
                if (MinHasher::estimate_jaccard(src_sigs[s], tgt_sigs[t]) >= cfg.theta) {
                    out.emplace_back(s, t);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t levenshtein_distance(const std::string& a, const std::string& b) {
    const std::u32string ua = decode_utf8(a);
    const std::u32string ub = decode_utf8(b);
    if (ua.empty()) return ub.size();
    if (ub.empty()) return ua.size();
    std::vector<std::size_t> prev(ub.size() + 1), curr(ub.size() + 1);
    for (std::size_t j = 0; j <= ub.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= ua.size(); ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= ub.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
        }
        std::swap(prev, curr);
    }
    return prev[ub.size()];
}

double levenshtein_similarity(const std::string& a, const std::string& b) {
    const std::size_t la = decode_utf8(a).size();
    const std::size_t lb = decode_utf8(b).size();
    if (la == 0 && lb == 0) return 1.0;
    const std::size_t longest = std::max(la, lb);
    return 1.0 - static_cast<double>(levenshtein_distance(a, b)) / static_cast<double>(longest);
}

TopKSimilarityMatrix string_similarity_matrix(
    const std::vector<std::pair<EntityId, EntityId>>& candidates,
    const std::vector<std::string>& src_names, const std::vector<std::string>& tgt_names, int k) {
    TopKSimilarityMatrix m(src_names.size(), tgt_names.size(), k);
    std::vector<std::vector<ScoredTarget>> staging(src_names.size());
    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), resolve_workers(0), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            scores[i] = levenshtein_similarity(src_names[candidates[i].first],
                                               tgt_names[candidates[i].second]);
        }
    });
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        staging[candidates[i].first].push_back({candidates[i].second, scores[i]});
    }
    for (std::size_t s = 0; s < staging.size(); ++s) {
        if (!staging[s].empty()) m.set_row(static_cast<EntityId>(s), std::move(staging[s]));
    }
    return m;
}

namespace {

std::vector<ScoredTarget> fuse_rows(const std::vector<ScoredTarget>& a,
                                    const std::vector<ScoredTarget>& b, double scale_b, int k) {
    std::vector<ScoredTarget> joined;
    joined.reserve(a.size() + b.size());
    for (const auto& e : a) joined.push_back(e);
    for (const auto& e : b) joined.push_back({e.target, scale_b * e.score});
    std::sort(joined.begin(), joined.end(), [](const ScoredTarget& x, const ScoredTarget& y) {
        return x.target < y.target;
    });
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

TopKSimilarityMatrix nff_fuse(const TopKSimilarityMatrix& m_se, const TopKSimilarityMatrix& m_st,
                              const NffConfig& cfg) {
    if (m_se.n_source() != m_st.n_source() || m_se.n_target() != m_st.n_target()) {
        throw std::invalid_argument("nff_fuse: id-space mismatch");
    }
    const int k = std::max(1, cfg.phi);
    TopKSimilarityMatrix out(m_se.n_source(), m_se.n_target(), k);
    for (EntityId s = 0; s < m_se.n_source(); ++s) {
        auto fused = fuse_rows(m_se.row(s), m_st.row(s), cfg.gamma_fusion, k);
        if (!fused.empty()) out.set_row(s, std::move(fused));
    }
    return out;
}

}  // namespace kgalign
