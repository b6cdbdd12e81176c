#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kgalign {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Deterministic RNG wrapper. All randomized algorithms in the library draw
// through this class so that a fixed seed reproduces identical output
// independent of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // Uniform real in [0, 1).
    double real() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform real in (-scale, scale).
    double symmetric(double scale) { return (2.0 * real() - 1.0) * scale; }

    bool chance(double p) { return real() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64-style mixing used to derive independent stage seeds from one
// run seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stage, std::uint64_t salt = 0) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stage + 1) + 0xbf58476d1ce4e5b9ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace kgalign
