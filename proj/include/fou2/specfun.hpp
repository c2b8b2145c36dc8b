#ifndef FOU2_SPECFUN_HPP
#define FOU2_SPECFUN_HPP

#include "fou2/types.hpp"

namespace fou2 {
namespace specfun {

// log Gamma(x) for x > 0.
double ln_gamma(double x);

// 1/Gamma(x) for any real x; exactly zero at the poles x = 0, -1, -2, ...
double inv_gamma(double x);

// Long double variants used by series accumulation.
long double ln_gamma_l(long double x);
long double inv_gamma_l(long double x);

// sin(pi x) with exact argument reduction to [-1/2, 1/2].
long double sin_pi_l(long double x);

// Generalized binomial coefficient Gamma(g+n) / (Gamma(g) n!).
// Requires g in (0, 1] and n >= 0; gen_binom(1, n) = 1 exactly.
double gen_binom(double g, int n);

// Gauss hypergeometric 2F1(a, 1, c; x) for real a, c > 0, x in [0, 1).
// Throws SeriesError when max_terms is reached with the tail estimate
// still above tolerance.
SeriesResult hyp2f1_unit_b(double a, double c, double x,
                           const SeriesControl& ctl = {});

// Same evaluation kept in long double end to end.  Accumulation loops that
// fold thousands of hypergeometric values with heavy sign cancellation need
// the extra headroom; rounding each value to double there would bias the
// fold far above its own tolerance.
long double hyp2f1_unit_b_l(double a, double c, double x,
                            const SeriesControl& ctl = {});

// 2F1(a, 1, c; 1) = Gamma(c) Gamma(c-a-1) / (Gamma(c-a) Gamma(c-1)).
// Requires c > 0 and c - a - 1 > 0.
double hyp2f1_at_one(double a, double c);

// Three-parameter Mittag-Leffler function E^gamma_{alpha,beta}(z) for
// alpha in (0, 1], gamma in (0, 1], z <= 0 and any finite real beta.
// Power series for small |z|, truncated algebraic expansion for large |z|,
// whichever self-reports the smaller error; throws SeriesError when neither
// route meets the tolerance.
SeriesResult prabhakar(double alpha, double beta, double gamma, double z,
                       const SeriesControl& ctl = {});

}  // namespace specfun
}  // namespace fou2

#endif
