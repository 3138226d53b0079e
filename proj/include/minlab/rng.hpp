#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams. Every draw is a pure function of
// (key, counter), so kick coefficients can be queried out of order and
// from any number of workers without shared state.

namespace minlab::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Derives a child key; used to fan a master seed out into per-sample,
/// per-kick, or per-trial streams.
inline constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t salt) {
    return mix64((parent + kGamma) ^ mix64(salt * kGamma + 0x632BE59BD9B4E019ull));
}

/// The n-th raw draw of the stream identified by `key`.
inline constexpr std::uint64_t stream_u64(std::uint64_t key, std::uint64_t counter) {
    return mix64(key + (counter + 1) * kGamma);
}

/// Maps 64 random bits to a double in [0, 1).
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double stream_unit(std::uint64_t key, std::uint64_t counter) {
    return to_unit(stream_u64(key, counter));
}

/// Uniform draw on [-half_width, half_width].
inline double stream_uniform_box(std::uint64_t key, std::uint64_t counter, double half_width) {
    return half_width * (2.0 * stream_unit(key, counter) - 1.0);
}

/// Standard normal via Box-Muller; consumes counters 2n and 2n+1.
inline double stream_gaussian(std::uint64_t key, std::uint64_t counter, double sigma) {
    const double u1 = stream_unit(key, 2 * counter);
    const double u2 = stream_unit(key, 2 * counter + 1);
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    return sigma * radius * std::cos(2.0 * M_PI * u2);
}

}  // namespace minlab::rng
