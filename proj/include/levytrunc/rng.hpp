#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace levytrunc {

using Engine = std::mt19937_64;

/// Independent substreams of one replication.
enum class Substream : std::uint64_t { jumps = 1, diffusion = 2, limit = 3, bias = 4, fixture = 5 };

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream (seed, replication, substream). Chained SplitMix64 so that nearby inputs give
/// unrelated engine states.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication, Substream sub) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ replication);
    return splitmix64(h ^ static_cast<std::uint64_t>(sub));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t replication, Substream sub) {
    return Engine(derive_seed(seed, replication, sub));
}

/// FNV-1a, used for model and config fingerprints.
inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace levytrunc
