#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fou2/process.hpp"

using fou2::CoeffTable;
using fou2::ProcessParams;

TEST_CASE("ProcessParams validates its admissible window") {
    CHECK_THROWS_AS(ProcessParams(0.0, 0.9, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(ProcessParams(1.1, 0.9, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(ProcessParams(0.8, 0.0, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(ProcessParams(0.8, 1.2, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(ProcessParams(0.8, 0.9, -0.1), std::invalid_argument);
    // alpha * gamma must exceed 1/2 for pointwise variances to exist.
    CHECK_THROWS_AS(ProcessParams(0.7, 0.7, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ProcessParams(0.5, 1.0, 0.5), std::invalid_argument);
    CHECK_NOTHROW(ProcessParams(0.8, 0.9, 0.0));
    CHECK_NOTHROW(ProcessParams(1.0, 1.0, 2.0));

    const ProcessParams p(0.8, 0.9, 0.7);
    CHECK(p.ag() == doctest::Approx(0.72).epsilon(1e-15));
    CHECK(p.hurst() == doctest::Approx(0.22).epsilon(1e-14));
    CHECK(p.lambda_alpha() == doctest::Approx(std::pow(0.7, 0.8)).epsilon(1e-15));
}

TEST_CASE("CoeffTable reproduces the quadratic coefficient family") {
    const ProcessParams p(0.8, 0.9, 0.7);
    const CoeffTable table(p, 24);
    REQUIRE(table.q_max() == 24);

    SUBCASE("binomial weights follow the rising-factorial recurrence") {
        const auto& b = table.binom();
        REQUIRE(b.size() >= 3);
        CHECK(static_cast<double>(b[0]) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(static_cast<double>(b[1]) == doctest::Approx(0.9).epsilon(1e-15));
        CHECK(static_cast<double>(b[2]) ==
              doctest::Approx(0.9 * 1.9 / 2.0).epsilon(1e-15));
    }

    SUBCASE("quadratic coefficients match reference values") {
        CHECK(table.lambda_q(0) ==
              doctest::Approx(0.622475911291440098235370225816).epsilon(1e-14));
        CHECK(table.lambda_q(1) ==
              doctest::Approx(1.60099940812118889146955317336).epsilon(1e-14));
        CHECK(table.lambda_q(2) ==
              doctest::Approx(2.17188105676285047498048171542).epsilon(1e-14));
    }

    SUBCASE("both generation orders agree and stay positive") {
        for (int q = 0; q <= table.q_max(); ++q) {
            CHECK(table.lambda_q(q) == table.omega_q(q));
            CHECK(table.lambda_q(q) > 0.0);
        }
    }
}

TEST_CASE("CoeffTable handles the classical limit") {
    const ProcessParams p(1.0, 1.0, 0.5);
    const CoeffTable table(p, 12);
    // For alpha = gamma = 1 the weights collapse to b_m = 1 and the
    // quadratic coefficients to lambda_q = sum_{m+n=q} 1/(m! n!) = 2^q / q!.
    long double fact = 1.0L;
    for (int q = 0; q <= 12; ++q) {
        if (q > 0) { fact *= q; }
        const double expected = static_cast<double>(std::pow(2.0L, q) / fact);
        CHECK(table.lambda_q(q) == doctest::Approx(expected).epsilon(1e-13));
    }
}
