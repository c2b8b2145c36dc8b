#ifndef FOU2_LANGEVIN_HPP
#define FOU2_LANGEVIN_HPP

#include <cstdint>

#include "fou2/process.hpp"
#include "fou2/types.hpp"

namespace fou2 {
namespace langevin {

// Discretizations of the relaxation kernel on a uniform grid.
//   midpoint:         w_k = G((k + 1/2) dt), the plain sampled kernel.
//   cell_integrated:  w_k = (1/dt) * integral of G over the k-th cell,
//                     evaluated from exact antiderivative differences so the
//                     t^(alpha gamma - 1) singularity in the first cell is
//                     integrated without bias.
//   first_cell_rms:   cell_integrated with w_0 replaced by
//                     sqrt(sigma^2(dt)/dt); the one-step variance then equals
//                     the exact process variance, which removes the leading
//                     first-cell bias of the ensemble variance.
//   operator_inverse: Grunwald-Letnikov weights of the inverse operator; the
//                     discrete composite operator annihilates this kernel
//                     exactly, so operator residuals of simulated paths are
//                     white by construction.
enum class KernelScheme { midpoint, cell_integrated, first_cell_rms, operator_inverse };

struct KernelTable {
    double dt;
    Vec weights;  // w_0 .. w_{n_steps-1}
    KernelScheme scheme;
};

// Tabulates n_steps kernel weights for the given scheme.  Requires dt > 0 and
// n_steps >= 1; kernel evaluation failures propagate.
KernelTable build_kernel_table(const ProcessParams& p, double dt, int n_steps,
                               KernelScheme scheme = KernelScheme::cell_integrated,
                               const SeriesControl& ctl = {});

// Discrete composite operator (D^alpha + lambda^alpha)^gamma on a uniform
// grid, expanded binomially into shifted fractional derivatives, each
// realized by Grunwald-Letnikov weights.  Row j of coeffs holds
// binom(gamma, j) (lambda^alpha dt^alpha)^j g_k^(alpha (gamma - j)) for
// k = 0..n_steps; stencil is the column sum divided by dt^(alpha gamma), so
// (K x)_n = sum_k stencil[k] x_{n-k} for series with x_0 = 0.
//
// j_max < 0 selects the smallest truncation whose bound on the first omitted
// row is below ctl.rel_tol (capped at 64); an explicit j_max whose tail bound
// exceeds ctl.rel_tol throws SeriesError.  For gamma = 1 the expansion
// terminates at j = 1 and the operator is exactly D^alpha + lambda^alpha.
struct GrunwaldOperator {
    double alpha;
    double gamma;
    double lambda;
    double dt;
    int j_max;
    Mat coeffs;   // (j_max + 1) x (n_steps + 1) composite weight table
    Vec stencil;  // length n_steps + 1

    GrunwaldOperator(const ProcessParams& p, double dt_, int n_steps, int j_max_ = -1,
                     const SeriesControl& ctl = {});
};

// Applies the discrete composite operator to a sampled series.  Requires
// series[0] == 0 (the zero-initial-value convention under which the
// left-sided derivative definitions coincide) and series no longer than the
// operator stencil.  Uses the direct triangular sum up to 4096 samples and an
// FFT convolution above; the two agree to 1e-10.
Vec grunwald_apply(const GrunwaldOperator& op, const Vec& series);

// Sampled realizations of the process.  Row i holds path i at times
// k dt for k = 0..n_steps; column 0 is identically zero (zero initial
// condition).
struct PathEnsemble {
    Mat paths;  // n_paths x (n_steps + 1)
    double dt;
    std::uint64_t seed;
    ProcessParams p;
    KernelScheme scheme;
};

constexpr std::uint64_t kDefaultMaxCells = 1ull << 27;

// Draws n_paths independent realizations x_k = sqrt(dt) * sum_{j<k}
// w_{k-1-j} xi_j with iid standard normal xi.  Each path derives its own
// generator from (seed, path index), so the ensemble is bit-identical for
// any n_threads and any scheduling order.  Throws std::invalid_argument when
// n_paths * (n_steps + 1) exceeds max_cells.
PathEnsemble simulate(const ProcessParams& p, double dt, int n_steps, int n_paths,
                      std::uint64_t seed,
                      KernelScheme scheme = KernelScheme::cell_integrated,
                      int n_threads = 1, std::uint64_t max_cells = kDefaultMaxCells,
                      const SeriesControl& ctl = {});

struct MomentEstimate {
    double value;
    double se;
    int n;
};

// Unbiased cross-moment estimate E[x(t_i) x(t_j)] over the ensemble (the
// process mean is identically zero, so no sample mean is subtracted) with
// jackknife standard error, which for a plain mean reduces to sd/sqrt(n).
// Requires n_paths >= 2 and valid grid indices.
MomentEstimate sample_covariance(const PathEnsemble& ens, int i, int j);

// Pooled residual autocorrelations rho_1..rho_max_lag of grunwald_apply
// applied to every path of the ensemble; a correctly matched operator and
// kernel leave residuals white, so the values stay inside Bartlett bands.
Vec residual_autocorrelation(const GrunwaldOperator& op, const PathEnsemble& ens,
                             int max_lag);

// Product-integration (piecewise-constant) fractional integral of order
// alpha in (0, 1] on a uniform grid:
//   out_k = (dt^alpha / Gamma(alpha + 1)) sum_{j<k} f_j ((k-j)^alpha - (k-j-1)^alpha).
// Exact for constant series; first-order accurate at interior points.
Vec fractional_integral(double alpha, const Vec& series, double dt);

}  // namespace langevin
}  // namespace fou2

#endif  // FOU2_LANGEVIN_HPP
