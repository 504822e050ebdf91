#include "levyhedge/levy_basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "levyhedge/errors.hpp"

namespace levyhedge {

namespace {

constexpr double kRankTolerance = 1e-12;

struct SupportPoint {
    double x = 0.0;
    double weight = 0.0;  // mass of mu at x
};

// mu(dx) = x^2 nu(dx) + sigma^2 dirac_0(dx), atoms at equal x merged.
std::vector<SupportPoint> support_of(const LevySpec& spec) {
    std::map<double, double> mass;
    if (spec.sigma > 0.0) mass[0.0] += spec.sigma * spec.sigma;
    for (const JumpAtom& atom : spec.jumps.atoms)
        mass[atom.size] += atom.intensity * atom.size * atom.size;
    std::vector<SupportPoint> points;
    points.reserve(mass.size());
    for (const auto& [x, w] : mass) points.push_back({x, w});
    return points;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double JumpMeasure::total_intensity() const {
    double s = 0.0;
    for (const JumpAtom& atom : atoms) s += atom.intensity;
    return s;
}

void JumpMeasure::validate() const {
    for (const JumpAtom& atom : atoms) {
        if (!std::isfinite(atom.size) || atom.size == 0.0)
            throw Error(ErrorKind::config, "jump atom size must be finite and nonzero",
                        "jumps.size");
        if (!std::isfinite(atom.intensity) || atom.intensity <= 0.0)
            throw Error(ErrorKind::config, "jump atom intensity must be finite and positive",
                        "jumps.intensity");
    }
}

void LevySpec::validate() const {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw Error(ErrorKind::config, "driver sigma must be finite and nonnegative", "sigma");
    jumps.validate();
    if (support_size() == 0)
        throw Error(ErrorKind::degenerate_driver,
                    "driver has neither a Gaussian part nor jump atoms");
}

int LevySpec::support_size() const {
    std::vector<double> sizes;
    sizes.reserve(jumps.atoms.size());
    for (const JumpAtom& atom : jumps.atoms) sizes.push_back(atom.size);
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    return static_cast<int>(sizes.size()) + (sigma > 0.0 ? 1 : 0);
}

std::vector<double> mu_moments(const LevySpec& spec, int max_order) {
    std::vector<double> moments(static_cast<std::size_t>(max_order) + 1, 0.0);
    moments[0] = spec.sigma * spec.sigma;
    for (const JumpAtom& atom : spec.jumps.atoms) {
        double power = atom.size * atom.size;
        for (int k = 0; k <= max_order; ++k) {
            moments[k] += atom.intensity * power;
            power *= atom.size;
        }
    }
    return moments;
}

double mu_inner_product(const LevySpec& spec, const Polynomial& a, const Polynomial& b) {
    double s = spec.sigma * spec.sigma * a(0.0) * b(0.0);
    for (const JumpAtom& atom : spec.jumps.atoms)
        s += atom.intensity * atom.size * atom.size * a(atom.size) * b(atom.size);
    return s;
}

TeugelsBasis build_basis(const LevySpec& spec) {
    spec.validate();
    const std::vector<SupportPoint> points = support_of(spec);
    const int n_points = static_cast<int>(points.size());

    std::vector<double> sqrt_w(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) sqrt_w[i] = std::sqrt(points[i].weight);

    TeugelsBasis basis;
    basis.sigma = spec.sigma;

    // Modified Gram-Schmidt on {1, x, x^2, ...} represented by their values
    // on the support points; coefficient vectors are carried along.
    std::vector<std::vector<double>> ortho;   // value vectors, unit norm
    std::vector<std::vector<double>> coeffs;  // matching polynomial coefficients
    double max_residual_sq = 0.0;

    for (int n = 0; n < n_points; ++n) {
        std::vector<double> v(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            v[i] = sqrt_w[i] * std::pow(points[i].x, n);
        std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
        c[static_cast<std::size_t>(n)] = 1.0;

        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < ortho.size(); ++j) {
                const double proj = dot(v, ortho[j]);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * ortho[j][i];
                for (std::size_t i = 0; i < coeffs[j].size(); ++i) c[i] -= proj * coeffs[j][i];
            }
        }

        const double residual_sq = dot(v, v);
        max_residual_sq = std::max(max_residual_sq, residual_sq);
        if (residual_sq <= kRankTolerance * max_residual_sq) break;

        const double norm = std::sqrt(residual_sq);
        for (double& x : v) x /= norm;
        for (double& x : c) x /= norm;
        ortho.push_back(std::move(v));
        coeffs.push_back(std::move(c));

        MartingalePair pair;
        pair.q = Polynomial(coeffs.back());
        pair.p = pair.q.times_x();
        basis.pairs.push_back(std::move(pair));
    }

    if (basis.pairs.empty())
        throw Error(ErrorKind::degenerate_driver, "measure carries no mass; no basis exists");
    return basis;
}

double brownian_coefficient(const TeugelsBasis& basis, int n) {
    if (n < 1 || n > basis.order())
        throw Error(ErrorKind::index_out_of_range,
                    "martingale order " + std::to_string(n) + " outside 1.." +
                        std::to_string(basis.order()));
    return basis.sigma * basis.pairs[static_cast<std::size_t>(n) - 1].q(0.0);
}

ComponentLayout ComponentLayout::from(const std::vector<TeugelsBasis>& bases) {
    ComponentLayout layout;
    layout.orders.reserve(bases.size());
    layout.offsets.reserve(bases.size());
    for (const TeugelsBasis& basis : bases) {
        layout.offsets.push_back(layout.total);
        layout.orders.push_back(basis.order());
        layout.total += basis.order();
    }
    return layout;
}

int ComponentLayout::flat(int driver, int order) const {
    if (driver < 0 || driver >= static_cast<int>(orders.size()))
        throw Error(ErrorKind::index_out_of_range,
                    "driver " + std::to_string(driver + 1) + " outside 1.." +
                        std::to_string(orders.size()));
    if (order < 1 || order > orders[static_cast<std::size_t>(driver)])
        throw Error(ErrorKind::index_out_of_range,
                    "martingale order " + std::to_string(order) + " outside 1.." +
                        std::to_string(orders[static_cast<std::size_t>(driver)]));
    return offsets[static_cast<std::size_t>(driver)] + order - 1;
}

}  // namespace levyhedge
