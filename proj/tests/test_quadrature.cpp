#include <doctest.h>

#include <cmath>

#include "fou2/quadrature.hpp"

using namespace fou2::quadrature;

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly") {
    const QuadRule rule = gauss_legendre(5);
    REQUIRE(rule.nodes.size() == 5);
    REQUIRE(rule.weights.size() == 5);
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    // Nodes ascending and symmetric about 0.
    for (int i = 1; i < 5; ++i) { CHECK(rule.nodes[i] > rule.nodes[i - 1]); }
    CHECK(rule.nodes[2] == doctest::Approx(0.0).epsilon(1e-14));
    // Exact through degree 2n - 1 = 9.
    for (int k = 0; k <= 9; ++k) {
        double acc = 0.0;
        for (int i = 0; i < 5; ++i) {
            acc += rule.weights[i] * std::pow(rule.nodes[i], k);
        }
        const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
        CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("Gauss-Hermite nodes integrate Gaussian moments exactly") {
    const QuadRule rule = gauss_hermite(8);
    REQUIRE(rule.nodes.size() == 8);
    const double sqrt_pi = std::sqrt(M_PI);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double y = rule.nodes[i];
        m0 += rule.weights[i];
        m2 += rule.weights[i] * y * y;
        m4 += rule.weights[i] * y * y * y * y;
    }
    CHECK(m0 == doctest::Approx(sqrt_pi).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(sqrt_pi / 2.0).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0 * sqrt_pi / 4.0).epsilon(1e-13));
}

TEST_CASE("gauss_panel integrates smooth functions") {
    const double val = gauss_panel([](double x) { return std::sin(x); }, 0.0, M_PI, 20);
    CHECK(val == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("graded_integrate resolves endpoint singularities") {
    SUBCASE("smooth integrand") {
        const double val = graded_integrate([](double v) { return std::exp(v); }, 1.0);
        CHECK(val == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    }
    SUBCASE("algebraic singularity at zero") {
        const double val =
            graded_integrate([](double v) { return std::pow(v, -0.3); }, 1.0);
        CHECK(val == doctest::Approx(1.0 / 0.7).epsilon(1e-10));
    }
    SUBCASE("square-root singularity with general upper limit") {
        const double val =
            graded_integrate([](double v) { return 1.0 / std::sqrt(v); }, 4.0);
        CHECK(val == doctest::Approx(4.0).epsilon(1e-7));
    }
    SUBCASE("zero upper limit") {
        CHECK(graded_integrate([](double v) { return v; }, 0.0) == 0.0);
    }
}
