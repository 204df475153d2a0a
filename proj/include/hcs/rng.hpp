#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

namespace hcs {

/// 64-bit FNV-1a; stable across platforms and runs (unlike std::hash).
[[nodiscard]] constexpr std::uint64_t stable_hash(std::string_view text,
                                                  std::uint64_t basis = 0xcbf29ce484222325ULL) {
    std::uint64_t h = basis;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// splitmix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of a named substream: order-independent, so parallel workers can
/// derive their own streams without coordination.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t seed,
                                               std::initializer_list<std::string_view> tags) {
    std::uint64_t h = mix64(seed);
    for (auto tag : tags) h = mix64(h ^ stable_hash(tag));
    return h;
}

/// Seeded stream; identical seeds give identical sequences.
struct Rng {
    std::uint64_t seed = 0;
    std::string algorithm_tag = "mt19937_64";

    [[nodiscard]] std::mt19937_64 engine() const { return std::mt19937_64(seed); }
    [[nodiscard]] Rng substream(std::initializer_list<std::string_view> tags) const {
        return Rng{derive_seed(seed, tags), algorithm_tag};
    }
};

}  // namespace hcs
