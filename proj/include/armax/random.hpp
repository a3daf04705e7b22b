#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>

namespace armax {

/// Anything that hands out uniform variates on the open interval (0,1).
template <class R>
concept UniformSource = requires(R& r) {
    { r.uniform() } -> std::convertible_to<double>;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the independent stream used by replicate `index` under `master`.
/// Rule: splitmix64(splitmix64(master) ^ (index + 1)). Depends only on the
/// pair, so replicate output is independent of scheduling.
inline constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ (index + 1));
}

/// Deterministic 64-bit Mersenne Twister stream. Uniforms are built from the
/// top 53 bits so results do not depend on the standard library's
/// distribution implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept {
        constexpr double scale = 0x1.0p-53;
        return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
    }

    double exponential() noexcept { return -std::log(uniform()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace armax
