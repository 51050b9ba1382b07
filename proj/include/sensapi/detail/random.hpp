#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace sensapi::detail {

// splitmix64; fixed algorithm so seeded output is identical across
// platforms and standard-library implementations.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform-enough draw in [0, bound); bound is tiny here so modulo
    // bias is irrelevant.
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }
};

// Fisher-Yates permutation of {0..n-1}, reproducible per seed.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace sensapi::detail
