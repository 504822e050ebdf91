#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace levyhedge {

/// Pairwise (cascade) summation: fixed association order, so results do not
/// depend on how work was split across threads, and rounding error grows
/// like log n instead of n.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double mean(std::span<const double> x) {
    return x.empty() ? 0.0 : pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased sample variance, two-pass.
inline double sample_variance(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    // Two-pass with sequential accumulation of centered squares; the pass is
    // single-threaded and order-fixed, so still deterministic.
    for (double v : x) {
        const double c = v - m;
        s += c * c;
    }
    return s / static_cast<double>(n - 1);
}

inline double std_error(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    return std::sqrt(sample_variance(x) / static_cast<double>(n));
}

}  // namespace levyhedge
