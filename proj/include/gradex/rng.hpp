#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gradex {

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

/// Derive an independent engine from a master seed and a stream label.
/// Stages drawing from differently labelled streams do not perturb each
/// other, so ablations (e.g. disabling one stage) keep the rest reproducible.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view label) {
    return std::mt19937_64(splitmix64(master_seed ^ fnv1a(label)));
}

}  // namespace gradex
