#include "nestreuse/random.hpp"

#include <cmath>
#include <numbers>

namespace nestreuse {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t key) noexcept {
    std::uint64_t counter = key;
    for (auto& word : s_) {
        counter += 0x9E3779B97F4A7C15ULL;
        word = splitmix64_mix(counter);
    }
}

RandomStream::result_type RandomStream::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::uniform() noexcept {
    // 53 random bits centred in their cell: never 0, never 1.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() noexcept {
    return -std::log(uniform());
}

void RandomStream::normals(std::span<double> out) noexcept {
    for (std::size_t k = 0; k < out.size(); k += 2) {
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        out[k] = radius * std::cos(angle);
        if (k + 1 < out.size()) {
            out[k + 1] = radius * std::sin(angle);
        }
    }
}

void RandomStream::jump() noexcept {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        0x180EC6D33CFD0ABAULL, 0xD5A61266F0C9392CULL, 0xA9582618E03FC9AAULL, 0x39ABDC4529B1661CULL};
    std::array<std::uint64_t, 4> acc{};
    for (const std::uint64_t word : kJump) {
        for (int b = 0; b < 64; ++b) {
            if (word & (std::uint64_t{1} << b)) {
                for (std::size_t i = 0; i < 4; ++i) {
                    acc[i] ^= s_[i];
                }
            }
            next();
        }
    }
    s_ = acc;
}

RandomStream make_stream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose) noexcept {
    std::uint64_t key = splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL);
    key = splitmix64_mix(key ^ (trial * 0xD1342543DE82EF95ULL + 0x632BE59BD9B4E019ULL));
    key = splitmix64_mix(key ^ (static_cast<std::uint64_t>(purpose) * 0xA0761D6478BD642FULL));
    return RandomStream(key);
}

}  // namespace nestreuse
