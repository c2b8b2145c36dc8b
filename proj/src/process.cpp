#include "fou2/process.hpp"

#include <cmath>

#include "fou2/specfun.hpp"

namespace fou2 {

ProcessParams::ProcessParams(double alpha_, double gamma_, double lambda_)
    : alpha(alpha_), gamma(gamma_), lambda(lambda_) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("ProcessParams: requires alpha in (0, 1]");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("ProcessParams: requires gamma in (0, 1]");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("ProcessParams: requires lambda >= 0");
    }
    if (!(alpha * gamma > 0.5)) {
        throw std::invalid_argument(
            "ProcessParams: requires alpha * gamma > 1/2 (finite pointwise variance)");
    }
}

double ProcessParams::lambda_alpha() const { return std::pow(lambda, alpha); }

namespace {

// Quadratic coefficients grouped as in the variance series.
std::vector<long double> quad_coeffs_variance(const std::vector<long double>& b,
                                              const std::vector<long double>& ig0,
                                              int q_max) {
    std::vector<long double> out(static_cast<size_t>(q_max) + 1, 0.0L);
    for (int q = 0; q <= q_max; ++q) {
        long double acc = 0.0L;
        for (int m = 0; m <= q; ++m) {
            int n = q - m;
            acc += b[static_cast<size_t>(m)] * b[static_cast<size_t>(n)] *
                   ig0[static_cast<size_t>(m)] * ig0[static_cast<size_t>(n)];
        }
        out[static_cast<size_t>(q)] = acc;
    }
    return out;
}

// Quadratic coefficients grouped as in the effective-diffusion series.
std::vector<long double> quad_coeffs_diffusion(const std::vector<long double>& b,
                                               const std::vector<long double>& ig0,
                                               int q_max) {
    std::vector<long double> out(static_cast<size_t>(q_max) + 1, 0.0L);
    for (int q = 0; q <= q_max; ++q) {
        long double acc = 0.0L;
        for (int n = 0; n <= q; ++n) {
            int m = q - n;
            acc += b[static_cast<size_t>(n)] * b[static_cast<size_t>(m)] *
                   ig0[static_cast<size_t>(n)] * ig0[static_cast<size_t>(m)];
        }
        out[static_cast<size_t>(q)] = acc;
    }
    return out;
}

}  // namespace

CoeffTable::CoeffTable(const ProcessParams& p, int q_max) : q_max_(q_max) {
    if (q_max < 0) {
        throw std::invalid_argument("CoeffTable: requires q_max >= 0");
    }
    const long double al = static_cast<long double>(p.alpha);
    const long double gl = static_cast<long double>(p.gamma);
    const size_t count = static_cast<size_t>(q_max) + 1;
    b_.resize(count);
    ig0_.resize(count);
    ig1_.resize(count);
    b_[0] = 1.0L;
    for (int m = 0; m < q_max; ++m) {
        b_[static_cast<size_t>(m) + 1] = b_[static_cast<size_t>(m)] * (gl + m) / (m + 1.0L);
    }
    for (int m = 0; m <= q_max; ++m) {
        long double e = al * (gl + m);
        ig0_[static_cast<size_t>(m)] = specfun::inv_gamma_l(e);
        ig1_[static_cast<size_t>(m)] = specfun::inv_gamma_l(1.0L + e);
    }
    lambda_ = quad_coeffs_variance(b_, ig0_, q_max);
    omega_ = quad_coeffs_diffusion(b_, ig0_, q_max);
    for (size_t q = 0; q < count; ++q) {
        if (!(lambda_[q] == omega_[q])) {
            throw std::logic_error("CoeffTable: coefficient families disagree");
        }
        if (!(lambda_[q] > 0.0L)) {
            throw std::logic_error("CoeffTable: coefficients must be positive");
        }
    }
}

}  // namespace fou2
