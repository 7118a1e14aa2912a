#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace odflow {

/// SplitMix64 generator (Steele, Lea & Flood 2014). Chosen because its
/// output sequence is fully specified by a few lines of integer
/// arithmetic, so fixtures reproduce bit-for-bit in any language:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform() maps the top 53 bits to [0, 1); normal() is Box-Muller using two
/// consecutive uniforms (u1 replaced by 1 - u1 so the log argument is > 0).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// floor(uniform() * bound), an integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept {
        return bound == 0 ? 0 : static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    double normal() noexcept {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and a stream index.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    SplitMix64 mix(base ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return mix.next();
}

} // namespace odflow
