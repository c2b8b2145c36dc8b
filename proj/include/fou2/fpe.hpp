#ifndef FOU2_FPE_HPP
#define FOU2_FPE_HPP

#include "fou2/process.hpp"
#include "fou2/types.hpp"

namespace fou2 {
namespace fpe {

// Space-time box for the density solver.  The start time must be positive:
// the effective diffusion coefficient behaves like t^(2 alpha gamma - 2) at
// the origin, so evolution starts from the exact Gaussian profile at t0.
struct Grid1D {
    double x_min;
    double x_max;
    int n_x;
    double t0;
    double t1;
    int n_t;

    Grid1D(double x_min_, double x_max_, int n_x_, double t0_, double t1_, int n_t_);

    double dx() const { return (x_max - x_min) / (n_x - 1); }
    double node(int k) const { return x_min + k * dx(); }
};

// Probability density per unit length at the grid nodes at time t.
struct DensityField {
    Vec values;
    double t;
};

// Drift term of the effective Fokker-Planck equation: none, a constant
// force g, or a harmonic restoring rate omega > 0.
struct DriftSpec {
    enum class Kind { free, linear, harmonic };

    Kind kind;
    double g;
    double omega;

    static DriftSpec make_free();
    static DriftSpec make_linear(double g);
    static DriftSpec make_harmonic(double omega);
};

// Diagnostics of one evolve run.
struct EvolveStats {
    int n_substeps = 0;
    double max_mass_drift = 0.0;   // max |trapezoid mass - 1| over accepted steps
    double min_density = 0.0;      // most negative value seen before clipping
    long clipped = 0;              // nodes clipped for undershoot below -1e-12
};

// Exact Gaussian solution of the free effective equation started as a point
// mass at x0: density (2 pi sigma^2(t))^(-1/2) exp(-(x-x0)^2 / (2 sigma^2(t))).
double analytic_density(const ProcessParams& p, double t, double x0, double x,
                        const SeriesControl& ctl = {});

// Effective diffusion coefficient of the harmonic case,
//   D_h(t) = D(t) - omega int_0^t e^(-omega s) d1C(t, t-s) ds,
// where d1C is the first-argument partial derivative of the two-time
// covariance; the integration-by-parts form keeps every factor integrable.
// n_nodes controls the panel budget of the two nested graded quadratures.
// The omega -> 0 limit recovers diffusion_coeff(p, t).
double harmonic_diffusion_coeff(const ProcessParams& p, double omega, double t,
                                int n_nodes = 300);

// Crank-Nicolson evolution of the effective equation from the analytic
// Gaussian at grid.t0 to grid.t1.  Free and linear cases advance with the
// exact variance increments sigma^2(t_{n+1}) - sigma^2(t_n); the harmonic
// case samples a log-spaced table of harmonic_diffusion_coeff values at the
// substep midpoints.  Dirichlet zero boundaries; the box must keep both
// boundaries at least 8 sigma(t1) away from the drifted center.  Fails
// explicitly when the substep controller would exceed 16 n_t steps or the
// per-step mass drift exceeds 1e-6.
DensityField evolve(const ProcessParams& p, const Grid1D& grid, const DriftSpec& drift,
                    double x0, EvolveStats* stats = nullptr);

}  // namespace fpe
}  // namespace fou2

#endif
