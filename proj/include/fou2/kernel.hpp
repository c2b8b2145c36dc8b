#ifndef FOU2_KERNEL_HPP
#define FOU2_KERNEL_HPP

#include "fou2/process.hpp"
#include "fou2/types.hpp"

namespace fou2 {
namespace kernel {

// Relaxation Green function G(t) = t^(ag-1) E^g_{a,ag}(-l^a t^a) for t > 0,
// where ag = alpha * gamma and E is the three-parameter Mittag-Leffler
// function.  Completely monotone on (0, inf).
double green_g(const ProcessParams& p, double t, const SeriesControl& ctl = {});

// dG/dt through the index-shifted closed form t^(ag-2) E^g_{a,ag-1}(.).
double green_g_prime(const ProcessParams& p, double t, const SeriesControl& ctl = {});

// int_0^t G(u) du through the index-raised closed form t^ag E^g_{a,ag+1}(.).
double green_g_integral(const ProcessParams& p, double t, const SeriesControl& ctl = {});

// Stationary-increment variance sigma^2(t) = int_0^t G(u)^2 du by the
// relaxation power series, summed over anti-diagonals in long double.
// Throws SeriesError when the series stalls; variance_quadrature covers
// that regime.
double variance_series(const ProcessParams& p, double t, const SeriesControl& ctl = {});

// Same quantity by graded-mesh Gauss quadrature after the substitution
// u = v^(1/(2 ag - 1)) that removes the endpoint singularity.  n_nodes
// controls the panel budget (>= 16; default 576 = 48 panels x 12 nodes).
double variance_quadrature(const ProcessParams& p, double t, int n_nodes = 576,
                           const SeriesControl& green_ctl = {});

// Two-time covariance C(t, s) = int_0^min(s,t) G(t-u) G(s-u) du by the
// double power series with hypergeometric anti-diagonal resummation.
// Arguments may come in either order; the diagonal s = t routes through
// the closed-form variance series.
double covariance_series(const ProcessParams& p, double t, double s,
                         const SeriesControl& ctl = {});

// Covariance by graded-mesh quadrature; shares the variance code path on
// the diagonal, so covariance_quadrature(p, t, t) == variance_quadrature(p, t)
// exactly.  green_ctl tunes the tolerance of the integrand evaluations.
double covariance_quadrature(const ProcessParams& p, double t, double s,
                             int n_nodes = 576, const SeriesControl& green_ctl = {});

// Effective diffusion coefficient D(t) = (1/2) d sigma^2 / dt by the
// term-differentiated series; requires t > 0.
double diffusion_coeff(const ProcessParams& p, double t, const SeriesControl& ctl = {});

// Bridge variance profile U(t) = C(beta, t) for 0 <= t <= beta.
double u_of_t(const ProcessParams& p, double t, double beta,
              const SeriesControl& ctl = {});

// U(beta): same quantity evaluated through the hypergeometric-at-one closed
// form, term-for-term comparable with variance_series(p, beta).
double u_of_beta(const ProcessParams& p, double beta, const SeriesControl& ctl = {});

}  // namespace kernel
}  // namespace fou2

#endif
