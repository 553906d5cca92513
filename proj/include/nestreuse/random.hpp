#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace nestreuse {

/// Tags that separate the random streams used for different jobs within one trial.
enum class StreamPurpose : std::uint64_t {
    engine = 1,
    naive = 2,
    audit = 3,
    test = 4,
};

/// Name and version of the generator, written into every output header.
inline constexpr std::string_view generator_name = "xoshiro256** v1 (splitmix64 stream derivation)";

/// SplitMix64 finalizer; bijective 64-bit mix.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** stream with a few distribution helpers.
///
/// Streams are single-owner. Every helper consumes a fixed number of raw
/// outputs so that sequences are reproducible across platforms; nothing here
/// goes through the implementation-defined std distributions.
class RandomStream {
public:
    using result_type = std::uint64_t;

    /// Seeds the four state words from a SplitMix64 sequence started at `key`.
    explicit RandomStream(std::uint64_t key) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }
    result_type next() noexcept;

    /// Uniform on the open interval (0, 1); one raw draw.
    double uniform() noexcept;

    /// Standard exponential; one raw draw.
    double exponential() noexcept;

    /// Fills `out` with independent standard normals (Box-Muller, pairs of raw draws;
    /// an odd tail discards its partner).
    void normals(std::span<double> out) noexcept;

    /// Fair coin; one raw draw.
    bool coin() noexcept { return (next() >> 63) != 0; }

    /// Advances the state by 2^128 outputs.
    void jump() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Independent reproducible stream for (seed, trial, purpose).
RandomStream make_stream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose) noexcept;

}  // namespace nestreuse
