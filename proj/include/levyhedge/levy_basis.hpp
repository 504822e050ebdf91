#pragma once

#include <cstdint>
#include <vector>

#include "levyhedge/polynomial.hpp"

namespace levyhedge {

struct JumpAtom {
    double size = 0.0;       // jump size, nonzero
    double intensity = 0.0;  // expected jumps per unit time, > 0
};

/// Finite-activity atomic jump measure: sum of intensity * dirac(size).
struct JumpMeasure {
    std::vector<JumpAtom> atoms;

    double total_intensity() const;
    void validate() const;
};

/// One driving process: Gaussian coefficient plus atomic jump measure.
struct LevySpec {
    double sigma = 0.0;
    JumpMeasure jumps;

    void validate() const;

    /// Number of support points of mu = x^2 nu(dx) + sigma^2 dirac_0.
    int support_size() const;
};

/// Orthonormal pair: q of degree n-1 and p(x) = x * q(x) of degree n.
struct MartingalePair {
    Polynomial q;
    Polynomial p;
};

/// Orthonormalized power-jump martingale basis of one driver. The n-th
/// martingale is  sigma * q_{n-1}(0) * B_t + int p_n(x) Ntilde(t, dx),
/// which gives <H^(m), H^(n)>_t = delta_{mn} t by construction.
struct TeugelsBasis {
    double sigma = 0.0;
    std::vector<MartingalePair> pairs;  // pairs[n-1] holds (q_{n-1}, p_n)

    int order() const { return static_cast<int>(pairs.size()); }
};

/// Moments of mu(dx) = x^2 nu(dx) + sigma^2 dirac_0(dx):
/// mu_k = sum_atoms intensity * size^(k+2) + sigma^2 * [k == 0].
std::vector<double> mu_moments(const LevySpec& spec, int max_order);

/// <P,Q>_mu = sigma^2 P(0)Q(0) + sum_atoms intensity * size^2 * P(size)Q(size).
double mu_inner_product(const LevySpec& spec, const Polynomial& a, const Polynomial& b);

/// Gram-Schmidt on {1, x, x^2, ...} in L^2(mu). Stops when the squared
/// residual norm drops below the relative rank tolerance, which on a
/// K-point measure happens exactly after K polynomials.
TeugelsBasis build_basis(const LevySpec& spec);

/// Coefficient sigma * q_{n-1}(0) multiplying the Brownian increment of
/// the n-th martingale (n is 1-based).
double brownian_coefficient(const TeugelsBasis& basis, int n);

/// Flat indexing over the martingale components of several drivers:
/// component (driver j, order k), k = 1..order(j), in lexicographic order.
struct ComponentLayout {
    std::vector<int> orders;   // per driver
    std::vector<int> offsets;  // per driver, offset of (j, 1)
    int total = 0;

    static ComponentLayout from(const std::vector<TeugelsBasis>& bases);

    int flat(int driver, int order) const;  // driver 0-based, order 1-based
};

}  // namespace levyhedge
