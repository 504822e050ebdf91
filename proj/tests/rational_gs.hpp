#pragma once

// Exact-rational Gram-Schmidt oracle for the orthonormal basis under
// mu(dx) = x^2 nu(dx) + sigma^2 dirac_0(dx). Classical (unmodified)
// projections in exact arithmetic, converted to double only at the end,
// so rounding in the production routine cannot mask a bug here.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "levyhedge/levy_basis.hpp"

namespace oracle {

using rational = boost::multiprecision::cpp_rational;

struct RationalAtom {
    rational size;
    rational intensity;
};

struct RationalMeasure {
    rational sigma2;  // variance of the Gaussian part, exact
    std::vector<RationalAtom> atoms;

    int support_size() const {
        std::vector<rational> sizes;
        for (const RationalAtom& atom : atoms) {
            bool seen = false;
            for (const rational& s : sizes) seen = seen || s == atom.size;
            if (!seen) sizes.push_back(atom.size);
        }
        return static_cast<int>(sizes.size()) + (sigma2 > 0 ? 1 : 0);
    }
};

// mu_k = sigma^2 [k == 0] + sum_atoms intensity * size^(k+2)
inline std::vector<rational> moments(const RationalMeasure& m, int max_order) {
    std::vector<rational> mu(static_cast<std::size_t>(max_order) + 1, rational(0));
    mu[0] = m.sigma2;
    for (const RationalAtom& atom : m.atoms) {
        rational power = atom.size * atom.size;
        for (int k = 0; k <= max_order; ++k) {
            mu[static_cast<std::size_t>(k)] += atom.intensity * power;
            power *= atom.size;
        }
    }
    return mu;
}

inline rational inner(const std::vector<rational>& a, const std::vector<rational>& b,
                      const std::vector<rational>& mu) {
    rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) s += a[i] * b[j] * mu[i + j];
    }
    return s;
}

struct ExactBasis {
    std::vector<std::vector<rational>> monic;  // orthogonal, leading coefficient 1
    std::vector<rational> norm2;
};

inline ExactBasis exact_basis(const RationalMeasure& m) {
    const int n = m.support_size();
    const std::vector<rational> mu = moments(m, 2 * n);
    ExactBasis basis;
    for (int k = 0; k < n; ++k) {
        std::vector<rational> u(static_cast<std::size_t>(k) + 1, rational(0));
        u[static_cast<std::size_t>(k)] = 1;
        for (int j = 0; j < k; ++j) {
            const rational proj = inner(u, basis.monic[static_cast<std::size_t>(j)], mu) /
                                  basis.norm2[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < basis.monic[static_cast<std::size_t>(j)].size(); ++i)
                u[i] -= proj * basis.monic[static_cast<std::size_t>(j)][i];
        }
        basis.norm2.push_back(inner(u, u, mu));
        basis.monic.push_back(std::move(u));
    }
    return basis;
}

// Normalized q coefficients as doubles, leading coefficient positive.
inline std::vector<std::vector<double>> normalized_q(const RationalMeasure& m) {
    const ExactBasis basis = exact_basis(m);
    std::vector<std::vector<double>> out;
    for (std::size_t k = 0; k < basis.monic.size(); ++k) {
        const double scale = 1.0 / std::sqrt(basis.norm2[k].convert_to<double>());
        std::vector<double> q;
        for (const rational& c : basis.monic[k]) q.push_back(c.convert_to<double>() * scale);
        out.push_back(std::move(q));
    }
    return out;
}

struct MeasureCase {
    RationalMeasure exact;
    levyhedge::LevySpec spec;  // same measure in doubles (dyadic rationals, so exact)
};

// Randomized atomic measures with dyadic-rational atoms and intensities:
// every value is exactly representable in double, so the float spec and
// the rational measure describe the same mu.
inline std::vector<MeasureCase> random_measures(int count, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_int_distribution<int> n_atoms_dist(1, 4);
    std::uniform_int_distribution<int> numer_dist(1, 6);
    std::uniform_int_distribution<int> denom_dist(1, 2);
    std::uniform_int_distribution<int> sign_dist(0, 1);
    std::uniform_int_distribution<int> intensity_numer_dist(1, 8);
    std::uniform_int_distribution<int> sigma_pick(0, 3);

    std::vector<MeasureCase> cases;
    while (static_cast<int>(cases.size()) < count) {
        MeasureCase mc;
        const int sigma_choice = sigma_pick(gen);  // 0, 1/4, 1, 4
        switch (sigma_choice) {
            case 0: mc.exact.sigma2 = 0; mc.spec.sigma = 0.0; break;
            case 1: mc.exact.sigma2 = rational(1, 4); mc.spec.sigma = 0.5; break;
            case 2: mc.exact.sigma2 = 1; mc.spec.sigma = 1.0; break;
            default: mc.exact.sigma2 = 4; mc.spec.sigma = 2.0; break;
        }

        const int n_atoms = n_atoms_dist(gen);
        std::vector<rational> used;
        for (int a = 0; a < n_atoms; ++a) {
            for (int attempt = 0; attempt < 64; ++attempt) {
                const int num = numer_dist(gen);
                const int den = denom_dist(gen);
                const int sign = sign_dist(gen) == 0 ? -1 : 1;
                const rational x(sign * num, den);
                // keep atoms well separated so the float comparison stays sharp
                if (abs(x) < rational(1, 2)) continue;
                bool ok = true;
                for (const rational& other : used)
                    ok = ok && abs(x - other) >= rational(1, 2);
                if (!ok) continue;

                const rational lam(intensity_numer_dist(gen), denom_dist(gen));
                mc.exact.atoms.push_back({x, lam});
                mc.spec.jumps.atoms.push_back(
                    {x.convert_to<double>(), lam.convert_to<double>()});
                used.push_back(x);
                break;
            }
        }
        if (mc.exact.atoms.empty() && mc.exact.sigma2 == 0) continue;
        cases.push_back(std::move(mc));
    }
    return cases;
}

}  // namespace oracle
