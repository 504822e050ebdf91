#include "doctest.h"

#include <cmath>

#include "levyhedge/errors.hpp"
#include "levyhedge/levy_basis.hpp"
#include "rational_gs.hpp"

using namespace levyhedge;

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

}  // namespace

TEST_SUITE("levy_basis") {

TEST_CASE("polynomial evaluation uses ascending coefficients") {
    Polynomial p({1.0, -2.0, 3.0});  // 1 - 2x + 3x^2
    CHECK(p(0.0) == 1.0);
    CHECK(p(2.0) == doctest::Approx(9.0));
    CHECK(p.degree() == 2);
    CHECK(Polynomial::monomial(3)(2.0) == 8.0);

    Polynomial xp = p.times_x();
    CHECK(xp.degree() == 3);
    CHECK(xp(2.0) == doctest::Approx(18.0));
    CHECK(eval_polynomial(xp, 0.0) == 0.0);
}

TEST_CASE("pure brownian gives q0 = 1/sigma and order 1") {
    LevySpec spec;
    spec.sigma = 1.0;
    TeugelsBasis basis = build_basis(spec);
    REQUIRE(basis.order() == 1);
    CHECK(close(basis.pairs[0].q(0.0), 1.0));
    // p1(x) = x * q0
    CHECK(close(basis.pairs[0].p(2.0), 2.0));
    CHECK(close(brownian_coefficient(basis, 1), 1.0));

    spec.sigma = 2.0;
    basis = build_basis(spec);
    REQUIRE(basis.order() == 1);
    CHECK(close(basis.pairs[0].q(0.0), 0.5));
    // sigma * q0(0) is 1 for every pure-Gaussian driver
    CHECK(close(brownian_coefficient(basis, 1), 1.0));
}

TEST_CASE("symmetric two-atom measure matches hand computation") {
    // atoms at +-1, intensity 1: mu has mass 1 at each of +-1
    LevySpec spec;
    spec.jumps.atoms = {{1.0, 1.0}, {-1.0, 1.0}};
    TeugelsBasis basis = build_basis(spec);
    REQUIRE(basis.order() == 2);

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(close(basis.pairs[0].q.coeffs[0], inv_sqrt2));
    // q1 = x / sqrt(2): the odd candidate is already orthogonal to 1
    REQUIRE(basis.pairs[1].q.coeffs.size() == 2);
    CHECK(close(basis.pairs[1].q.coeffs[0], 0.0));
    CHECK(close(basis.pairs[1].q.coeffs[1], inv_sqrt2));

    // p2 = x^2 / sqrt(2)
    CHECK(close(basis.pairs[1].p(3.0), 9.0 * inv_sqrt2));
}

TEST_CASE("basis terminates at the support size") {
    LevySpec two;
    two.jumps.atoms = {{-0.3, 2.0}, {0.5, 1.2}};
    CHECK(two.support_size() == 2);
    CHECK(build_basis(two).order() == 2);

    LevySpec mixed;
    mixed.sigma = 0.5;
    mixed.jumps.atoms = {{0.35, 1.5}};
    CHECK(mixed.support_size() == 2);
    CHECK(build_basis(mixed).order() == 2);

    // duplicate atom sizes merge into one support point
    LevySpec dup;
    dup.jumps.atoms = {{0.5, 1.0}, {0.5, 2.0}};
    CHECK(dup.support_size() == 1);
    CHECK(build_basis(dup).order() == 1);
}

TEST_CASE("orthonormality holds in the measure inner product") {
    LevySpec spec;
    spec.sigma = 0.7;
    spec.jumps.atoms = {{-0.4, 1.1}, {0.25, 3.0}, {1.5, 0.2}};
    TeugelsBasis basis = build_basis(spec);
    REQUIRE(basis.order() == 4);

    for (int a = 0; a < basis.order(); ++a)
        for (int b = 0; b < basis.order(); ++b) {
            const double ip = mu_inner_product(spec, basis.pairs[a].q, basis.pairs[b].q);
            CHECK(std::fabs(ip - (a == b ? 1.0 : 0.0)) <= 1e-10);
        }
}

TEST_CASE("moment table matches the inner product") {
    LevySpec spec;
    spec.sigma = 1.5;
    spec.jumps.atoms = {{0.5, 2.0}, {-1.0, 0.5}};
    const std::vector<double> m = mu_moments(spec, 3);

    // mu_0 = sigma^2 + sum lambda x^2
    CHECK(close(m[0], 2.25 + 2.0 * 0.25 + 0.5 * 1.0));
    // mu_1 = sum lambda x^3
    CHECK(close(m[1], 2.0 * 0.125 + 0.5 * -1.0));
    CHECK(close(m[2], 2.0 * 0.0625 + 0.5 * 1.0));

    // <1, x> under mu equals mu_1
    CHECK(close(mu_inner_product(spec, Polynomial({1.0}), Polynomial({0.0, 1.0})), m[1]));
}

TEST_CASE("degenerate driver is rejected") {
    LevySpec spec;  // sigma 0, no atoms
    CHECK_THROWS_AS(spec.validate(), Error);
    try {
        build_basis(spec);
        FAIL("expected degenerate_driver");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_driver);
    }
}

TEST_CASE("invalid atoms are config errors") {
    LevySpec zero_size;
    zero_size.jumps.atoms = {{0.0, 1.0}};
    try {
        zero_size.validate();
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(e.location() == "jumps.size");
    }

    LevySpec bad_intensity;
    bad_intensity.jumps.atoms = {{0.5, -1.0}};
    CHECK_THROWS_AS(bad_intensity.validate(), Error);

    LevySpec bad_sigma;
    bad_sigma.sigma = -1.0;
    CHECK_THROWS_AS(bad_sigma.validate(), Error);
}

TEST_CASE("order indices are range checked") {
    LevySpec spec;
    spec.sigma = 1.0;
    TeugelsBasis basis = build_basis(spec);
    try {
        brownian_coefficient(basis, 2);
        FAIL("expected index_out_of_range");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::index_out_of_range);
    }
    CHECK_THROWS_AS(brownian_coefficient(basis, 0), Error);
}

TEST_CASE("component layout flattens drivers lexicographically") {
    LevySpec brownian;
    brownian.sigma = 1.0;
    LevySpec two;
    two.jumps.atoms = {{-0.3, 2.0}, {0.5, 1.2}};

    std::vector<TeugelsBasis> bases = {build_basis(brownian), build_basis(two)};
    ComponentLayout layout = ComponentLayout::from(bases);
    CHECK(layout.total == 3);
    CHECK(layout.orders == std::vector<int>{1, 2});
    CHECK(layout.flat(0, 1) == 0);
    CHECK(layout.flat(1, 1) == 1);
    CHECK(layout.flat(1, 2) == 2);
    CHECK_THROWS_AS(layout.flat(0, 2), Error);
    CHECK_THROWS_AS(layout.flat(2, 1), Error);
    CHECK_THROWS_AS(layout.flat(-1, 1), Error);
}

TEST_CASE("floating basis matches the exact-rational oracle") {
    const auto cases = oracle::random_measures(10, 20260816u);
    REQUIRE(cases.size() == 10);

    for (const auto& mc : cases) {
        const TeugelsBasis basis = build_basis(mc.spec);
        const auto expected = oracle::normalized_q(mc.exact);
        REQUIRE(basis.order() == static_cast<int>(expected.size()));

        for (std::size_t k = 0; k < expected.size(); ++k) {
            REQUIRE(basis.pairs[k].q.coeffs.size() == expected[k].size());
            for (std::size_t i = 0; i < expected[k].size(); ++i) {
                const double got = basis.pairs[k].q.coeffs[i];
                const double want = expected[k][i];
                CHECK(std::fabs(got - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
            }
        }
    }
}

TEST_CASE("oracle agrees with the closed forms on tiny measures") {
    // single atom at x with intensity lam: q0 = 1/(|x| sqrt(lam))
    oracle::RationalMeasure m;
    m.sigma2 = 0;
    m.atoms = {{oracle::rational(1, 2), oracle::rational(3)}};
    const auto q = oracle::normalized_q(m);
    REQUIRE(q.size() == 1);
    CHECK(close(q[0][0], 1.0 / (0.5 * std::sqrt(3.0)), 1e-14));
}

}  // TEST_SUITE
