#include "levyhedge/polynomial.hpp"

namespace levyhedge {

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

Polynomial Polynomial::monomial(int n) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c.back() = 1.0;
    return Polynomial(std::move(c));
}

Polynomial Polynomial::times_x() const {
    std::vector<double> c(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) c[i + 1] = coeffs[i];
    return Polynomial(std::move(c));
}

double eval_polynomial(const Polynomial& p, double x) { return p(x); }

}  // namespace levyhedge
