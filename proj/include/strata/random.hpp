// random.hpp
#pragma once

#include <cstdint>
#include <random>

namespace strata {

using RandomStream = std::mt19937_64;

namespace detail {
inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Independent stream for replicate `index` of a run seeded with `seed`.
/// Depends only on (seed, index), never on scheduling.
inline RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = detail::splitmix64(seed ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
    return RandomStream(key);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
template <class Engine>
inline double uniform01(Engine& eng) {
    static_assert(Engine::max() - Engine::min() == ~std::uint64_t{0}, "needs a 64-bit engine");
    return static_cast<double>((eng() - Engine::min()) >> 11) * 0x1.0p-53;
}

} // namespace strata
