#pragma once
// Deterministic, platform-independent randomness used wherever results must
// be byte-reproducible across runs, platforms and thread counts: FNV-1a
// string hashing, the splitmix64 generator, and a Fisher-Yates permutation
// (for i from n-1 down to 1: j = next() % (i+1); swap). Reports embed only
// seeds, so these exact algorithms are part of the reproducibility contract.

#include <cstdint>
#include <string_view>
#include <vector>

namespace parc {

constexpr std::uint64_t kFnvBasis = 14695981039346656037ull;

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t basis = kFnvBasis) {
    std::uint64_t hash = basis;
    for (char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    return hash;
}

inline std::uint64_t mix_seed(std::uint64_t basis, std::uint64_t seed) {
    return basis ^ (seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull);
}

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix64 rng{seed};
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace parc
