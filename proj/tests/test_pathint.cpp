#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fou2/fpe.hpp"
#include "fou2/kernel.hpp"
#include "fou2/langevin.hpp"
#include "fou2/pathint.hpp"
#include "fou2/quadrature.hpp"

using fou2::ProcessParams;
using fou2::Vec;
namespace pi = fou2::pathint;
namespace lv = fou2::langevin;
namespace kernel = fou2::kernel;

namespace {

const ProcessParams kRough(0.8, 0.9, 0.7);
const ProcessParams kOU(1.0, 1.0, 1.0);

// Closed-form covariance of the classical Ornstein-Uhlenbeck member.
double ou_cov(double lam, double t, double s) {
    return (std::exp(-lam * std::abs(t - s)) - std::exp(-lam * (t + s))) / (2.0 * lam);
}

}  // namespace

TEST_CASE("classical path pins the endpoints and follows the bridge profile") {
    CHECK_THROWS_AS(pi::BoundaryData(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pi::BoundaryData(0.0, 1.0 / 0.0, 1.0), std::invalid_argument);

    const pi::BoundaryData b(0.3, -0.4, 1.0);

    SUBCASE("boundary pins are exact") {
        CHECK(pi::classical_path(kRough, b, 0.0) == 0.3);
        CHECK(pi::classical_path(kRough, b, 1.0) == -0.4);
        CHECK_THROWS_AS(pi::classical_path(kRough, b, -0.1), std::domain_error);
        CHECK_THROWS_AS(pi::classical_path(kRough, b, 1.1), std::domain_error);
    }

    SUBCASE("monotone between the endpoints") {
        double prev = pi::classical_path(kRough, b, 0.0);
        for (int k = 1; k <= 10; ++k) {
            const double cur = pi::classical_path(kRough, b, 0.1 * k);
            CHECK(cur < prev);  // descending endpoints, increasing profile
            prev = cur;
        }
    }

    SUBCASE("classical member follows the covariance-ratio closed form") {
        for (double t : {0.3, 0.7}) {
            const double expect =
                b.x0 + (b.x_beta - b.x0) * ou_cov(1.0, t, 1.0) / ou_cov(1.0, 1.0, 1.0);
            CHECK(pi::classical_path(kOU, b, t) == doctest::Approx(expect).epsilon(1e-10));
        }
    }

    SUBCASE("classical member satisfies its Euler-Lagrange equation") {
        // x'' = lambda^2 (x - x0) for the exponential-kernel member; a
        // centered second difference at dt = 1e-3 must vanish to 1e-4.
        const double dt = 1e-3;
        double worst = 0.0;
        for (int i = 1; i <= 30; ++i) {
            const double t = i / 31.0;
            const double xm = pi::classical_path(kOU, b, t - dt);
            const double x0 = pi::classical_path(kOU, b, t);
            const double xp = pi::classical_path(kOU, b, t + dt);
            worst = std::max(worst, std::abs((xp - 2.0 * x0 + xm) / (dt * dt) -
                                             (x0 - b.x0)));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("velocity kernel and its normalization") {
    SUBCASE("classical value at the start of the window") {
        const double u = ou_cov(1.0, 1.0, 1.0);
        CHECK(pi::w_kernel(kOU, 1.0, 0.0) ==
              doctest::Approx(std::exp(-1.0) / u).epsilon(1e-12));
    }

    SUBCASE("driftless kernel is a pure power of the remaining time") {
        const ProcessParams p(0.8, 0.9, 0.0);
        const double r = pi::w_kernel(p, 1.0, 0.2) / pi::w_kernel(p, 1.0, 0.6);
        CHECK(r == doctest::Approx(std::pow(0.8 / 0.4, p.ag() - 1.0)).epsilon(1e-10));
    }

    SUBCASE("squared kernel integrates to the reciprocal variance") {
        for (const ProcessParams& p : {kRough, kOU, ProcessParams(0.9, 0.7, 1.3)}) {
            const double beta = 1.25;
            const double prod =
                pi::w_square_integral(p, beta) * kernel::u_of_beta(p, beta);
            CHECK(prod == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    SUBCASE("domain validation") {
        CHECK_THROWS_AS(pi::w_kernel(kRough, 1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(pi::w_kernel(kRough, 0.0, 0.0), std::domain_error);
        CHECK_THROWS_AS(pi::w_square_integral(kRough, -1.0), std::domain_error);
    }
}

TEST_CASE("propagator is the correctly normalized Gaussian in the endpoint") {
    const pi::BoundaryData peak(0.2, 0.2, 1.0);
    const double u = kernel::u_of_beta(kRough, 1.0);
    CHECK(pi::propagator(kRough, peak) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * u)).epsilon(1e-13));

    SUBCASE("Gauss-Hermite moments: mass one, second moment U(beta)") {
        const auto rule = fou2::quadrature::gauss_hermite(64);
        const double scale = std::sqrt(2.0 * u);
        double mass = 0.0;
        double m2 = 0.0;
        for (int i = 0; i < rule.nodes.size(); ++i) {
            const double y = rule.nodes[i];
            const double xb = 0.2 + scale * y;
            // exp(y^2) times the Gaussian keeps the integrand polynomial-flat
            const double f = pi::propagator(kRough, pi::BoundaryData(0.2, xb, 1.0)) *
                             std::exp(y * y) * scale;
            mass += rule.weights[i] * f;
            m2 += rule.weights[i] * f * (xb - 0.2) * (xb - 0.2);
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m2 == doctest::Approx(u).epsilon(1e-11));
    }

    SUBCASE("coincides with the one-time density of the free equation") {
        double worst = 0.0;
        for (int k = -5; k <= 5; ++k) {
            const double xb = 0.3 * k;
            const double a = pi::propagator(kRough, pi::BoundaryData(0.1, xb, 1.0));
            const double d = fou2::fpe::analytic_density(kRough, 1.0, 0.1, xb);
            worst = std::max(worst, std::abs(a - d));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("classical action: closed form, positivity, discrete agreement") {
    SUBCASE("closed form for the classical member") {
        const double u = ou_cov(1.0, 1.0, 1.0);
        CHECK(pi::classical_action(kOU, pi::BoundaryData(0.0, 1.0, 1.0)) ==
              doctest::Approx(0.5 / u).epsilon(1e-12));
        CHECK(pi::classical_action(kRough, pi::BoundaryData(0.4, 0.4, 2.0)) == 0.0);
        CHECK(pi::classical_action(kRough, pi::BoundaryData(0.0, 1.0, 1.0)) > 0.0);
    }

    SUBCASE("discretized action of the sampled classical path converges to it") {
        const ProcessParams p(1.0, 1.0, 0.7);
        const pi::BoundaryData b(0.0, 1.0, 1.0);
        const int n = 2048;
        const double dt = 1.0 / n;
        Vec samp(n + 1);
        for (int k = 0; k <= n; ++k) {
            samp[k] = pi::classical_path(p, b, k * dt);
        }
        const lv::GrunwaldOperator op(p, dt, n);
        const double s_disc = pi::discrete_action(p, {samp, dt}, op);
        const double s_cont = pi::classical_action(p, b);
        CHECK(std::abs(s_disc / s_cont - 1.0) < 1e-3);
    }
}

TEST_CASE("discrete minimizer: exact optimum with the dual-kernel value") {
    const pi::BoundaryData b(0.2, 1.2, 1.0);
    const int n = 256;
    const double dt = 1.0 / n;

    for (const ProcessParams& p : {kRough, kOU}) {
        CAPTURE(p.alpha);
        const lv::GrunwaldOperator op(p, dt, n);
        const auto xc = pi::discrete_classical_path(op, b);
        CHECK(xc.values[0] == b.x0);
        CHECK(xc.values[n] == b.x_beta);

        // Minimum value against the inverse-kernel energy.
        const double s_min = pi::discrete_action(p, xc, op);
        const auto vt =
            lv::build_kernel_table(p, dt, n, lv::KernelScheme::operator_inverse);
        const double ud = dt * vt.weights.squaredNorm();
        CHECK(s_min == doctest::Approx(0.5 / ud).epsilon(1e-10));

        // Pinned perturbations never lower the action, and the first-order
        // term cancels so the quadratic decomposition is exact.
        std::mt19937_64 gen(9);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int rep = 0; rep < 200; ++rep) {
            Vec q = Vec::Zero(n + 1);
            for (int k = 1; k < n; ++k) {
                q[k] = 1e-2 * nd(gen);
            }
            const double s_xq = pi::discrete_action(p, {xc.values + q, dt}, op);
            const double s_q = pi::discrete_action(p, {q, dt}, op);
            CHECK(s_xq >= s_min);
            CHECK(std::abs(s_xq - s_min - s_q) <= 1e-8 * (1.0 + s_q));
        }
    }

    SUBCASE("discrete path tracks the continuum classical path") {
        const lv::GrunwaldOperator op(kOU, dt, n);
        const auto xc = pi::discrete_classical_path(op, b);
        double gap = 0.0;
        for (int k = 0; k <= n; ++k) {
            gap = std::max(gap,
                           std::abs(xc.values[k] - pi::classical_path(kOU, b, k * dt)));
        }
        CHECK(gap < 1e-3);
    }

    SUBCASE("grid and parameter mismatches are rejected") {
        const lv::GrunwaldOperator op(kRough, dt, n);
        CHECK_THROWS_AS(pi::discrete_classical_path(op, pi::BoundaryData(0.0, 1.0, 2.0)),
                        std::invalid_argument);
        const auto xc = pi::discrete_classical_path(op, b);
        CHECK_THROWS_AS(pi::discrete_action(kOU, xc, op), std::invalid_argument);
        CHECK_THROWS_AS(pi::discrete_action(kRough, {xc.values, 2.0 * dt}, op),
                        std::invalid_argument);
        Vec too_long = Vec::Zero(n + 2);
        CHECK_THROWS_AS(pi::discrete_action(kRough, {too_long, dt}, op),
                        std::invalid_argument);
        Vec zero = Vec::Zero(n + 1);
        CHECK(pi::discrete_action(kRough, {zero, dt}, op) == 0.0);
    }
}

TEST_CASE("partition function scales with volume and inverts the peak propagator") {
    const double z1 = pi::partition_function(kRough, 1.0, 1.0);
    const double z2 = pi::partition_function(kRough, 1.0, 2.0);
    CHECK(z2 == doctest::Approx(2.0 * z1).epsilon(1e-15));

    const double u = ou_cov(1.0, 1.0, 1.0);
    CHECK(pi::partition_function(kOU, 1.0, 1.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * u)).epsilon(1e-12));

    const double peak = pi::propagator(kRough, pi::BoundaryData(0.3, 0.3, 1.0));
    CHECK(pi::partition_function(kRough, 1.0, 5.0) / peak ==
          doctest::Approx(5.0).epsilon(1e-12));

    CHECK_THROWS_AS(pi::partition_function(kRough, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pi::partition_function(kRough, 0.0, 1.0), std::domain_error);
}

TEST_CASE("generating-functional covariance matches the direct kernels") {
    CHECK(pi::generating_covariance(kRough, 1.5, 0.5) ==
          doctest::Approx(kernel::covariance_series(kRough, 1.5, 0.5)).epsilon(1e-6));
    const ProcessParams drift_free(0.8, 0.9, 0.0);
    CHECK(pi::generating_covariance(drift_free, 1.5, 0.5) ==
          doctest::Approx(kernel::covariance_series(drift_free, 1.5, 0.5)).epsilon(1e-6));

    CHECK(pi::generating_covariance(kRough, 1.0, 0.0) == 0.0);
    CHECK(pi::generating_covariance(kRough, 0.0, 1.0) == 0.0);
    CHECK(pi::generating_covariance(kRough, 1.3, 0.7) ==
          pi::generating_covariance(kRough, 0.7, 1.3));
    CHECK_THROWS_AS(pi::generating_covariance(kRough, -1.0, 0.5), std::domain_error);
}

TEST_CASE("classical member chains over intermediate times") {
    // Only the exponential-kernel member is Markov, so composing its
    // transition kernel over [0, tau] and [tau, beta] must reproduce the
    // direct kernel; for fractional indices no such identity is asserted.
    const double lam = 1.0, beta = 1.0, tau = 0.4, a = 0.3, bb = -0.5;
    const auto trans = [&](double from, double to, double time) {
        const double var = (1.0 - std::exp(-2.0 * lam * time)) / (2.0 * lam);
        const double mean = from * std::exp(-lam * time);
        return std::exp(-0.5 * (to - mean) * (to - mean) / var) /
               std::sqrt(2.0 * M_PI * var);
    };
    const int m = 4001;
    const double lo = -8.0, hi = 8.0, h = (hi - lo) / (m - 1);
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const double y = lo + k * h;
        const double w = (k == 0 || k == m - 1) ? 0.5 : 1.0;
        acc += w * trans(a, y, tau) * trans(y, bb, beta - tau);
    }
    acc *= h;
    CHECK(acc == doctest::Approx(trans(a, bb, beta)).epsilon(1e-12));

    // Started from zero, the transition kernel is the boundary propagator.
    CHECK(pi::propagator(kOU, pi::BoundaryData(0.0, bb, beta)) ==
          doctest::Approx(trans(0.0, bb, beta)).epsilon(1e-13));
}
