#ifndef FOU2_PATHINT_HPP
#define FOU2_PATHINT_HPP

#include "fou2/langevin.hpp"
#include "fou2/process.hpp"
#include "fou2/types.hpp"

namespace fou2 {
namespace pathint {

// Endpoints of a boundary-pinned path problem on [0, beta].
struct BoundaryData {
    double x0;
    double x_beta;
    double beta;
    BoundaryData(double x0_, double x_beta_, double beta_);
};

// Uniformly sampled path; values[k] sits at t = k dt.  When the path
// represents a pinned problem, values.front() and values.back() carry the
// endpoints.
struct DiscretePath {
    Vec values;
    double dt;
};

// Action-minimizing pinned trajectory x_c(t) = x0 + (x_beta - x0) U(t)/U(beta)
// where U(t) is the bridge variance profile.  Requires 0 <= t <= beta; the
// endpoints are reproduced exactly and the path is monotone between them.
double classical_path(const ProcessParams& p, const BoundaryData& b, double t,
                      const SeriesControl& ctl = {});

// Velocity kernel of the classical path, W(beta - t) = G(beta - t)/U(beta).
// Requires 0 <= t < beta; diverges at t -> beta when alpha gamma < 1.
double w_kernel(const ProcessParams& p, double beta, double t,
                const SeriesControl& ctl = {});

// integral_0^beta W(beta - t)^2 dt by graded quadrature under the power
// substitution that flattens the (beta - t)^(2 alpha gamma - 2) endpoint
// singularity; analytically equal to 1/U(beta), so the product with U(beta)
// is a sharp self-check of the kernel normalization.
double w_square_integral(const ProcessParams& p, double beta, int n_nodes = 576,
                         const SeriesControl& ctl = {});

// Boundary propagator (2 pi U(beta))^(-1/2) exp(-|x_beta - x0|^2 / (2 U(beta))):
// a Gaussian in x_beta with variance U(beta) that integrates to one.
double propagator(const ProcessParams& p, const BoundaryData& b,
                  const SeriesControl& ctl = {});

// Action of the classical path, |x_beta - x0|^2 / (2 U(beta)); nonnegative and
// zero only for equal endpoints.
double classical_action(const ProcessParams& p, const BoundaryData& b,
                        const SeriesControl& ctl = {});

// Quadratic action of a sampled path: the composite operator is applied to
// the path shifted to a zero start (the zero-initial-value convention), and
// S = dt/2 * sum_k [(K xbar)_k]^2 over k = 1..n.  The operator grid must
// match path.dt and the stencil must cover the path length.
double discrete_action(const ProcessParams& p, const DiscretePath& path,
                       const langevin::GrunwaldOperator& op);

// Exact minimizer of the discrete action among paths pinned to b on the
// operator's grid (n = stencil length - 1 steps, so n dt must equal beta).
// Solved by one backward substitution for the dual residual, which the
// stationarity conditions make proportional to the reversed inverse-kernel
// weights, followed by one forward solve; the minimum value satisfies
// S_min = |x_beta - x0|^2 / (2 U_d) with U_d = dt sum_m v_m^2.
DiscretePath discrete_classical_path(const langevin::GrunwaldOperator& op,
                                     const BoundaryData& b);

// Partition function Z(beta) = volume / sqrt(2 pi U(beta)); linear in volume.
double partition_function(const ProcessParams& p, double beta, double volume,
                          const SeriesControl& ctl = {});

// Covariance through the generating-functional route; delegates to the
// kernel quadrature (same G G product integral) and keeps the s = 0 or
// t = 0 pinned-start zeros explicit.
double generating_covariance(const ProcessParams& p, double t, double s,
                             int n_nodes = 576);

}  // namespace pathint
}  // namespace fou2

#endif  // FOU2_PATHINT_HPP
