#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qnet {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent stream seed from a parent seed and a tag, so each
/// concern (matrix, pairs, priorities, arrivals, ...) draws from its own
/// generator and perturbing one never shifts another.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag)
{
    return mix64(parent ^ mix64(fnv1a(tag)));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index)
{
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

} // namespace qnet
