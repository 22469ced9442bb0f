#ifndef WCHARGE_SEEDING_HPP
#define WCHARGE_SEEDING_HPP

#include <cstdint>
#include <initializer_list>

namespace wcharge {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hashes a master seed together with a tuple of counters. Each distinct
/// tuple yields an independent-looking 64-bit value, so random events can be
/// addressed by (round, link, ...) instead of by draw order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t c : counters) {
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace wcharge

#endif  // WCHARGE_SEEDING_HPP
