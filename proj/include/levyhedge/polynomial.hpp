#pragma once

#include <vector>

namespace levyhedge {

/// Dense polynomial, coefficients stored in ascending degree.
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    double operator()(double x) const;

    /// x^n
    static Polynomial monomial(int n);

    /// Multiplication by x (coefficient shift).
    Polynomial times_x() const;
};

double eval_polynomial(const Polynomial& p, double x);

}  // namespace levyhedge
