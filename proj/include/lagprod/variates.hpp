/*
   Copyright 2026 The lagprod Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lagprod {

namespace detail {

/// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(mix64(parent ^ 0x6A09E667F3BCC909ULL) + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t kMulA = 0xD2511F53u;
    constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    constexpr std::uint32_t kWeylB = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

}  // namespace detail

/// Counter-based random stream. The full output tape is a pure function of
/// the 64-bit key and the number of words consumed, so streams are cheap to
/// copy, to fork into substreams, and to replay.
///
/// A single stream must not be shared between threads; hand each consumer
/// its own substream instead.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t key() const noexcept { return key_; }

    /// Number of 64-bit words consumed so far.
    std::uint64_t position() const noexcept { return position_; }

    /// Child stream for `index`; does not advance this stream.
    RandomStream substream(std::uint64_t index) const noexcept {
        return RandomStream(detail::derive_key(key_, index));
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t block = position_ >> 1;
        if (block != cached_block_) {
            const std::array<std::uint32_t, 4> ctr = {
                static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0u, 0u};
            const std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key_),
                                                    static_cast<std::uint32_t>(key_ >> 32)};
            buffer_ = detail::philox4x32(ctr, k);
            cached_block_ = block;
        }
        const unsigned lane = static_cast<unsigned>(position_ & 1u) * 2u;
        ++position_;
        return (std::uint64_t{buffer_[lane]} << 32) | buffer_[lane + 1];
    }

    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
    std::uint64_t position_ = 0;
    std::uint64_t cached_block_ = std::numeric_limits<std::uint64_t>::max();
    std::array<std::uint32_t, 4> buffer_{};
};

/// Deterministic substream `index` of the experiment seeded by `seed`.
inline RandomStream split_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return RandomStream(detail::derive_key(detail::mix64(seed), index));
}

/// Standard normal variate (Box-Muller, one output per pair of uniforms so
/// the stream carries no cached state beyond its counter).
inline double gaussian(RandomStream& stream) noexcept {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

namespace detail {

// Marsaglia-Tsang squeeze for shape >= 1; returns log of the variate.
inline double log_gamma_variate_ge1(RandomStream& stream, double shape) noexcept {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = gaussian(stream);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return std::log(d) + std::log(v);
        }
    }
}

}  // namespace detail

/// Gamma(shape, 1) variate. Shapes below 1 use the boost
/// G(a) = G(a + 1) * U^(1/a), evaluated in log space.
inline double gamma_variate(RandomStream& stream, double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("gamma_variate: shape must be positive and finite");
    }
    if (shape >= 1.0) {
        return std::exp(detail::log_gamma_variate_ge1(stream, shape));
    }
    const double log_g = detail::log_gamma_variate_ge1(stream, shape + 1.0);
    const double log_u = std::log(stream.uniform());
    return std::exp(log_g + log_u / shape);
}

/// Degrees-of-freedom parameter of a chi variate. Zero is the point mass at 0.
struct ChiParam {
    double alpha = 0.0;
};

/// Chi variate with E[chi^2] = alpha, i.e. density proportional to
/// x^(alpha-1) exp(-x^2/2). Sampled as sqrt(2 * Gamma(alpha/2, 1)).
inline double chi(RandomStream& stream, ChiParam param) {
    if (param.alpha < 0.0 || std::isnan(param.alpha)) {
        throw std::invalid_argument("chi: alpha must be nonnegative");
    }
    if (param.alpha == 0.0) {
        return 0.0;
    }
    const double g = gamma_variate(stream, 0.5 * param.alpha);
    // Extremely small shapes can underflow; keep draws for alpha > 0 strictly positive.
    return std::max(std::sqrt(2.0 * g), std::numeric_limits<double>::min());
}

/// E[chi_alpha] = sqrt(2) Gamma((alpha+1)/2) / Gamma(alpha/2).
inline double chi_mean(double alpha) {
    if (alpha < 0.0) {
        throw std::invalid_argument("chi_mean: alpha must be nonnegative");
    }
    if (alpha == 0.0) {
        return 0.0;
    }
    return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (alpha + 1.0)) - std::lgamma(0.5 * alpha));
}

}  // namespace lagprod
