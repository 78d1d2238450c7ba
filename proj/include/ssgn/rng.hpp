#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ssgn {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

// Derive an independent stream seed from a base seed plus up to three tags.
// Used everywhere a sub-stream is needed (per band, per epoch, per sample) so
// results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(base + 0x9e3779b97f4a7c15ull);
    s = mix64(s ^ mix64(a + 0xd1b54a32d192ed03ull));
    s = mix64(s ^ mix64(b + 0x8cb92ba72f3d8dd7ull));
    s = mix64(s ^ mix64(c + 0xa24baed4963ee407ull));
    return s;
}

// Deterministic generator (splitmix64 core). Self-contained on purpose:
// standard-library distributions differ between toolchains, and noise
// realizations here must be reproducible byte for byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // standard normal via Box-Muller; consumes exactly two uniforms per draw
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // first `count` elements of a seeded shuffle of {0, ..., n-1}
    std::vector<int> sample_distinct(int n, int count) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        for (int i = 0; i < count; ++i) {
            int j = i + int(below(std::uint64_t(n - i)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(count);
        return idx;
    }

private:
    std::uint64_t state_;
};

} // namespace ssgn
