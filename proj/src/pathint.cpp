#include "fou2/pathint.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fou2/kernel.hpp"
#include "fou2/quadrature.hpp"

namespace fou2 {
namespace pathint {

namespace {

int panels_for(int n_nodes) { return std::max(2, n_nodes / 12 - 1); }

void require_op_match(const ProcessParams& p, const langevin::GrunwaldOperator& op,
                      const char* fn) {
    if (op.alpha != p.alpha || op.gamma != p.gamma || op.lambda != p.lambda) {
        std::ostringstream os;
        os << fn << ": operator was built for different process parameters";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

BoundaryData::BoundaryData(double x0_, double x_beta_, double beta_)
    : x0(x0_), x_beta(x_beta_), beta(beta_) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("BoundaryData: requires beta > 0");
    }
    if (!std::isfinite(x0) || !std::isfinite(x_beta)) {
        throw std::invalid_argument("BoundaryData: requires finite endpoints");
    }
}

double classical_path(const ProcessParams& p, const BoundaryData& b, double t,
                      const SeriesControl& ctl) {
    if (!(t >= 0.0) || t > b.beta) {
        std::ostringstream os;
        os << "classical_path: requires 0 <= t <= beta, got t=" << t;
        throw std::domain_error(os.str());
    }
    if (t == 0.0) {
        return b.x0;
    }
    if (t == b.beta) {
        return b.x_beta;
    }
    const double ratio =
        kernel::u_of_t(p, t, b.beta, ctl) / kernel::u_of_beta(p, b.beta, ctl);
    return b.x0 + (b.x_beta - b.x0) * ratio;
}

double w_kernel(const ProcessParams& p, double beta, double t,
                const SeriesControl& ctl) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::domain_error("w_kernel: requires beta > 0");
    }
    if (!(t >= 0.0) || t >= beta) {
        std::ostringstream os;
        os << "w_kernel: requires 0 <= t < beta, got t=" << t;
        throw std::domain_error(os.str());
    }
    return kernel::green_g(p, beta - t, ctl) / kernel::u_of_beta(p, beta, ctl);
}

double w_square_integral(const ProcessParams& p, double beta, int n_nodes,
                         const SeriesControl& ctl) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::domain_error("w_square_integral: requires beta > 0");
    }
    // With s = beta - t and v = s^q, q = 2 alpha gamma - 1, the integrand
    // W(s)^2 ds = (G(s)/U)^2 ds becomes regular at v = 0.
    const double u = kernel::u_of_beta(p, beta, ctl);
    const double q = 2.0 * p.ag() - 1.0;
    const auto f = [&](double v) -> double {
        const double s = std::pow(v, 1.0 / q);
        const double g = kernel::green_g(p, s, ctl);
        return g * g * std::pow(v, 1.0 / q - 1.0) / q;
    };
    return quadrature::graded_integrate(f, std::pow(beta, q), panels_for(n_nodes), 12) /
           (u * u);
}

double propagator(const ProcessParams& p, const BoundaryData& b,
                  const SeriesControl& ctl) {
    const double u = kernel::u_of_beta(p, b.beta, ctl);
    const double d = b.x_beta - b.x0;
    return std::exp(-0.5 * d * d / u) / std::sqrt(2.0 * M_PI * u);
}

double classical_action(const ProcessParams& p, const BoundaryData& b,
                        const SeriesControl& ctl) {
    const double d = b.x_beta - b.x0;
    return 0.5 * d * d / kernel::u_of_beta(p, b.beta, ctl);
}

double discrete_action(const ProcessParams& p, const DiscretePath& path,
                       const langevin::GrunwaldOperator& op) {
    require_op_match(p, op, "discrete_action");
    const int n = static_cast<int>(path.values.size()) - 1;
    if (n < 1) {
        throw std::invalid_argument("discrete_action: path needs at least two samples");
    }
    if (!(path.dt > 0.0) ||
        std::abs(path.dt - op.dt) > 1e-12 * std::max(path.dt, op.dt)) {
        throw std::invalid_argument("discrete_action: path and operator grids differ");
    }
    if (path.values.size() > op.stencil.size()) {
        throw std::invalid_argument("discrete_action: operator stencil shorter than path");
    }
    Vec shifted = path.values.array() - path.values[0];
    shifted[0] = 0.0;  // exact zero start for the operator
    const Vec r = langevin::grunwald_apply(op, shifted);
    return 0.5 * op.dt * r.tail(n).squaredNorm();
}

DiscretePath discrete_classical_path(const langevin::GrunwaldOperator& op,
                                     const BoundaryData& b) {
    const int n = static_cast<int>(op.stencil.size()) - 1;
    if (n < 1) {
        throw std::invalid_argument(
            "discrete_classical_path: operator needs at least one step");
    }
    if (std::abs(n * op.dt - b.beta) > 1e-9 * b.beta) {
        std::ostringstream os;
        os << "discrete_classical_path: operator horizon " << n * op.dt
           << " does not match beta " << b.beta;
        throw std::invalid_argument(os.str());
    }
    const Vec& w = op.stencil;

    // Stationarity of S = dt/2 sum (K x)_k^2 in the interior nodes says the
    // residual y = K x is annihilated by the adjoint: sum_{k>=i} w_{k-i} y_k = 0
    // for i = 1..n-1.  Backward substitution with the free scale y_n = 1.
    Vec y(n + 1);
    y[0] = 0.0;
    y[n] = 1.0;
    for (int i = n - 1; i >= 1; --i) {
        double acc = 0.0;
        for (int m = 1; m <= n - i; ++m) {
            acc += w[m] * y[i + m];
        }
        y[i] = -acc / w[0];
    }

    // Forward solve K x = y with the pinned zero start, then scale and shift
    // onto the requested endpoints.
    Vec x(n + 1);
    x[0] = 0.0;
    for (int k = 1; k <= n; ++k) {
        double acc = y[k];
        for (int m = 1; m <= k; ++m) {
            acc -= w[m] * x[k - m];
        }
        x[k] = acc / w[0];
    }
    if (x[n] == 0.0) {
        throw std::runtime_error("discrete_classical_path: degenerate terminal response");
    }
    x *= (b.x_beta - b.x0) / x[n];
    x.array() += b.x0;
    x[0] = b.x0;
    x[n] = b.x_beta;
    return {std::move(x), op.dt};
}

double partition_function(const ProcessParams& p, double beta, double volume,
                          const SeriesControl& ctl) {
    if (!(volume > 0.0) || !std::isfinite(volume)) {
        throw std::invalid_argument("partition_function: requires volume > 0");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::domain_error("partition_function: requires beta > 0");
    }
    return volume / std::sqrt(2.0 * M_PI * kernel::u_of_beta(p, beta, ctl));
}

double generating_covariance(const ProcessParams& p, double t, double s, int n_nodes) {
    if (!(t >= 0.0) || !(s >= 0.0) || !std::isfinite(t) || !std::isfinite(s)) {
        throw std::domain_error("generating_covariance: requires t, s >= 0");
    }
    if (t == 0.0 || s == 0.0) {
        return 0.0;  // pinned start
    }
    return kernel::covariance_quadrature(p, t, s, n_nodes);
}

}  // namespace pathint
}  // namespace fou2
