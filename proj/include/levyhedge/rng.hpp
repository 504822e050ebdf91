#pragma once

// Counter-based random streams (Philox 4x32-10, Salmon et al. 2011).
// Each (path, stream) pair owns an independent substream addressed purely
// by counter words, so parallel and serial generation produce identical
// output.

#include <array>
#include <cmath>
#include <cstdint>

namespace levyhedge::rng {

namespace detail {

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mul_hi_lo(kMul0, ctr[0], hi0, lo0);
        detail::mul_hi_lo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// One substream of the root seed, addressed by (path, stream). Draw order
/// within a substream is sequential; distinct addresses never collide.
class Substream {
public:
    Substream(std::uint64_t seed, std::uint64_t path, std::uint32_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)),
          stream_(stream) {}

    std::uint64_t next_u64() {
        if (buffered_ == 0) {
            const auto block = philox4x32({block_index_++, stream_, path_lo_, path_hi_}, key_);
            buffer_[0] = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
            buffer_[1] = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
            buffered_ = 2;
        }
        return buffer_[--buffered_];
    }

    /// Uniform on the open interval (0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Standard normal via Box-Muller, pairs cached within the substream.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Poisson count by CDF inversion; one uniform per draw. Large means
    /// are split into chunks to keep exp(-mean) representable.
    long next_poisson(double mean) {
        long total = 0;
        while (mean > 400.0) {
            total += poisson_once(400.0);
            mean -= 400.0;
        }
        return total + poisson_once(mean);
    }

private:
    long poisson_once(double mean) {
        if (mean <= 0.0) return 0;
        const double u = next_uniform();
        double prob = std::exp(-mean);
        double cum = prob;
        long k = 0;
        const long cap = static_cast<long>(mean + 40.0 * std::sqrt(mean) + 50.0);
        while (u > cum && k < cap) {
            ++k;
            prob *= mean / static_cast<double>(k);
            cum += prob;
        }
        return k;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint32_t stream_;
    std::uint32_t block_index_ = 0;
    std::uint64_t buffer_[2] = {0, 0};
    int buffered_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace levyhedge::rng
