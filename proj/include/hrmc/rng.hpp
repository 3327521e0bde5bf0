#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hrmc/types.hpp"

namespace hrmc {

using Rng = std::mt19937_64;

/// splitmix64 step; used to derive independent child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministically derive the seed of an independent RNG substream.
/// (master, stream, substream) -> seed, so parallel tasks can each own a
/// stream that does not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(s);
    s ^= substream * 0x9e3779b97f4a7c15ULL + a;
    return splitmix64(s) ^ b;
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream,
                    std::uint64_t substream = 0) {
    return Rng(derive_seed(master, stream, substream));
}

/// k distinct values from {0, ..., n-1}, uniformly, in selection order.
inline std::vector<Index> sample_without_replacement(Index n, Index k, Rng& rng) {
    std::vector<Index> pool(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    if (k > n) k = n;
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<Index> dist(i, n - 1);
        Index j = dist(rng);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace hrmc
