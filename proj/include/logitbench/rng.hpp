#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace logitbench {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based child seed: a pure function of (parent, stream, index), so
/// the seed of any unit of work does not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(parent) ^ stream) ^ index);
}

// Sub-stream tags used when splitting a replication seed.
namespace stream {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t folds = 3;
inline constexpr std::uint64_t calibration = 4;
}  // namespace stream

}  // namespace logitbench
