#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace switchsde {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Splittable counter-based random stream: xoshiro256++ seeded through
/// splitmix64 from a (seed, stream) pair. Distinct stream ids give
/// decorrelated streams, so Monte Carlo trials can draw independently
/// while the whole experiment stays reproducible from one seed.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : SplitRng(seed, 0) {}

    SplitRng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t a = seed;
        std::uint64_t b = stream ^ 0x5851F42D4C957F2DULL;
        const std::uint64_t sa = detail::splitmix64(a);
        const std::uint64_t sb = detail::splitmix64(b);
        std::uint64_t origin = sa ^ detail::rotl64(sb, 31);
        for (auto& word : state_) word = detail::splitmix64(origin);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static SplitRng substream(std::uint64_t seed, std::uint64_t stream) {
        return SplitRng(seed, stream);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Exponential waiting time with the given rate (mean 1/rate).
    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
        return -std::log1p(-uniform01()) / rate;
    }

    /// Standard normal draw (Box-Muller; draws are produced in pairs).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Index draw from a finite distribution; weights need not be normalized.
    int categorical(std::span<const double> weights) {
        if (weights.empty()) throw std::invalid_argument("categorical: empty weight vector");
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("categorical: weights sum to zero");
        const double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace switchsde
