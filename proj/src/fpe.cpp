#include "fou2/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fou2/kernel.hpp"
#include "fou2/quadrature.hpp"
#include "fou2/specfun.hpp"

namespace fou2 {
namespace fpe {

namespace {

// Crank-Nicolson diffusion number kept at or below this value per substep;
// larger values are stable but ring on sharp profiles.
constexpr double kMaxDiffusionNumber = 25.0;
// Advection number (drift cell Courant count) kept at or below this value.
constexpr double kMaxDriftNumber = 2.0;
// Hard cap of the substep controller, relative to the requested n_t.
constexpr int kSubstepBudgetFactor = 16;
// Nodes of the log-spaced harmonic diffusion table.
constexpr int kDhTableNodes = 65;

int panels_for(int n_nodes) { return std::max(2, n_nodes / 12 - 1); }

// Solve the tridiagonal system (a sub, b diag, c super) r = rhs in place;
// the solution overwrites r.
void thomas(const Vec& a, Vec& b, const Vec& c, Vec& r) {
    const int k = static_cast<int>(b.size());
    for (int i = 1; i < k; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    r[k - 1] /= b[k - 1];
    for (int i = k - 2; i >= 0; --i) {
        r[i] = (r[i] - c[i] * r[i + 1]) / b[i];
    }
}

double trapezoid_mass(const Vec& v, double dx) {
    return dx * (v.sum() - 0.5 * (v[0] + v[v.size() - 1]));
}

// Piecewise-linear interpolation table in log t for the harmonic diffusion
// coefficient; the coefficient is smooth but steep near t0 when the free
// coefficient still carries its t^(2 alpha gamma - 2) transient.
class DhTable {
  public:
    DhTable(const ProcessParams& p, double omega, double t0, double t1) {
        logt_.resize(kDhTableNodes);
        val_.resize(kDhTableNodes);
        const double lr = std::log(t1 / t0);
        for (int i = 0; i < kDhTableNodes; ++i) {
            const double t = t0 * std::exp(lr * i / (kDhTableNodes - 1));
            logt_[i] = std::log(t);
            val_[i] = harmonic_diffusion_coeff(p, omega, t);
        }
    }

    double operator()(double t) const {
        const double u = std::log(t);
        if (u <= logt_.front()) {
            return val_.front();
        }
        if (u >= logt_.back()) {
            return val_.back();
        }
        const auto it = std::upper_bound(logt_.begin(), logt_.end(), u);
        const size_t hi = static_cast<size_t>(it - logt_.begin());
        const double w = (u - logt_[hi - 1]) / (logt_[hi] - logt_[hi - 1]);
        return (1.0 - w) * val_[hi - 1] + w * val_[hi];
    }

  private:
    std::vector<double> logt_;
    std::vector<double> val_;
};

struct StepCoeffs {
    double l_sub;    // coefficient of p_{k-1} in the half-operator L
    double l_diag;   // coefficient of p_k (x-independent part)
    double l_super;  // coefficient of p_{k+1}
    // Harmonic drift adds +-phi x_{k +- 1/2}; zero otherwise.
    double phi = 0.0;
};

// One Crank-Nicolson substep (I - L) p_new = (I + L) p_old on the interior,
// Dirichlet zero at both ends.
void cn_substep(Vec& pv, const StepCoeffs& sc, const Grid1D& grid, Vec& a, Vec& b,
                Vec& c, Vec& r) {
    const int n = grid.n_x;
    const int k = n - 2;
    const double dx = grid.dx();
    for (int i = 0; i < k; ++i) {
        const double x_lo = grid.x_min + (i + 0.5) * dx;   // x_{k-1/2}
        const double x_hi = grid.x_min + (i + 1.5) * dx;   // x_{k+1/2}
        const double ls = sc.l_sub - sc.phi * x_lo;
        const double lu = sc.l_super + sc.phi * x_hi;
        a[i] = -ls;
        b[i] = 1.0 - sc.l_diag;
        c[i] = -lu;
        r[i] = (1.0 + sc.l_diag) * pv[i + 1] + ls * pv[i] + lu * pv[i + 2];
    }
    thomas(a, b, c, r);
    pv[0] = 0.0;
    pv[n - 1] = 0.0;
    for (int i = 0; i < k; ++i) {
        pv[i + 1] = r[i];
    }
}

}  // namespace

Grid1D::Grid1D(double x_min_, double x_max_, int n_x_, double t0_, double t1_, int n_t_)
    : x_min(x_min_), x_max(x_max_), n_x(n_x_), t0(t0_), t1(t1_), n_t(n_t_) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw std::invalid_argument("Grid1D: requires x_min < x_max");
    }
    if (n_x < 3) {
        throw std::invalid_argument("Grid1D: requires n_x >= 3");
    }
    if (!(t0 > 0.0) || !(t1 > t0) || !std::isfinite(t1)) {
        throw std::invalid_argument("Grid1D: requires 0 < t0 < t1");
    }
    if (n_t < 1) {
        throw std::invalid_argument("Grid1D: requires n_t >= 1");
    }
}

DriftSpec DriftSpec::make_free() { return {Kind::free, 0.0, 0.0}; }

DriftSpec DriftSpec::make_linear(double g) {
    if (!std::isfinite(g)) {
        throw std::invalid_argument("DriftSpec: requires finite g");
    }
    return {Kind::linear, g, 0.0};
}

DriftSpec DriftSpec::make_harmonic(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::invalid_argument("DriftSpec: requires omega > 0");
    }
    return {Kind::harmonic, 0.0, omega};
}

double analytic_density(const ProcessParams& p, double t, double x0, double x,
                        const SeriesControl& ctl) {
    if (!(t > 0.0)) {
        throw std::domain_error("analytic_density: requires t > 0");
    }
    const double var = kernel::variance_series(p, t, ctl);
    const double d = x - x0;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

double harmonic_diffusion_coeff(const ProcessParams& p, double omega, double t,
                                int n_nodes) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw std::domain_error("harmonic_diffusion_coeff: requires omega > 0");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::domain_error("harmonic_diffusion_coeff: requires t > 0");
    }
    const int panels = panels_for(n_nodes);
    const double ag = p.ag();
    const double la = p.lambda_alpha();
    const double p2 = 2.0 * ag - 1.0;

    // d1C(t, tau) = (1/ag) int_0^(tau^ag) G'(t - tau + w^(1/ag))
    //               E^g_{a,ag}(-l^a w^(1/g)) dw  for 0 < tau <= t.
    const auto d1c = [&](double tau) -> double {
        if (!(tau > 0.0)) {
            return 0.0;
        }
        const double s = t - tau;
        const auto f = [&](double w) -> double {
            const double v = std::pow(w, 1.0 / ag);
            const double gp = kernel::green_g_prime(p, s + v);
            const double e = specfun::prabhakar(p.alpha, ag, p.gamma,
                                                -la * std::pow(w, 1.0 / p.gamma))
                                 .value;
            return gp * e;
        };
        return quadrature::graded_integrate(f, std::pow(tau, ag), panels, 12) / ag;
    };

    // Outer integral int_0^t e^(-omega s) d1C(t, t-s) ds after s = y^(1/p2),
    // which flattens the s^(2 alpha gamma - 2) shoulder at s = 0.
    const auto outer = [&](double y) -> double {
        const double s = std::pow(y, 1.0 / p2);
        const double tau = std::max(t - s, 0.0);
        const double jac = std::pow(y, 1.0 / p2 - 1.0) / p2;
        return std::exp(-omega * s) * d1c(tau) * jac;
    };

    const double tail = quadrature::graded_integrate(outer, std::pow(t, p2), panels, 12);
    return kernel::diffusion_coeff(p, t) - omega * tail;
}

DensityField evolve(const ProcessParams& p, const Grid1D& grid, const DriftSpec& drift,
                    double x0, EvolveStats* stats) {
    const int n = grid.n_x;
    const double dx = grid.dx();
    const bool harmonic = drift.kind == DriftSpec::Kind::harmonic;
    const bool linear = drift.kind == DriftSpec::Kind::linear;

    // The Dirichlet box must dominate the support: both walls at least
    // 8 sigma(t1) from every position the center visits.
    const double sig1 = std::sqrt(kernel::variance_series(p, grid.t1));
    const double c_last = linear ? x0 + drift.g * (grid.t1 - grid.t0) : x0;
    if (std::min(x0, c_last) - grid.x_min < 8.0 * sig1 ||
        grid.x_max - std::max(x0, c_last) < 8.0 * sig1) {
        throw std::invalid_argument(
            "evolve: boundaries closer than 8 sigma(t1) to the evolving center");
    }

    // Cell-averaged Gaussian profile at t0.
    const double s0 = std::sqrt(kernel::variance_series(p, grid.t0));
    const double inv = 1.0 / (s0 * std::sqrt(2.0));
    Vec pv(n);
    for (int k = 0; k < n; ++k) {
        const double lo = (grid.node(k) - 0.5 * dx - x0) * inv;
        const double hi = (grid.node(k) + 0.5 * dx - x0) * inv;
        pv[k] = (std::erf(hi) - std::erf(lo)) / (2.0 * dx);
    }
    pv[0] = 0.0;
    pv[n - 1] = 0.0;

    EvolveStats st;
    st.min_density = pv.minCoeff();

    std::optional<DhTable> dh;
    if (harmonic) {
        dh.emplace(p, drift.omega, grid.t0, grid.t1);
    }

    const double dt_macro = (grid.t1 - grid.t0) / grid.n_t;
    const double x_abs = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
    const int substep_budget = kSubstepBudgetFactor * grid.n_t;

    Vec a(n - 2), b(n - 2), c(n - 2), r(n - 2);
    double var_lo = kernel::variance_series(p, grid.t0);

    for (int step = 0; step < grid.n_t; ++step) {
        const double ta = grid.t0 + step * dt_macro;
        const double tb = (step + 1 == grid.n_t) ? grid.t1 : ta + dt_macro;

        int m = 1;
        if (harmonic) {
            const double dmid = (*dh)(0.5 * (ta + tb));
            const double rn = dmid * dt_macro / (2.0 * dx * dx);
            const double cn = drift.omega * x_abs * dt_macro / (4.0 * dx);
            m = static_cast<int>(std::ceil(
                std::max(rn / kMaxDiffusionNumber, cn / kMaxDriftNumber)));
        } else {
            const double var_hi = kernel::variance_series(p, tb);
            const double rn = (var_hi - var_lo) / (4.0 * dx * dx);
            m = static_cast<int>(std::ceil(rn / kMaxDiffusionNumber));
        }
        m = std::max(m, 1);
        if (st.n_substeps + m > substep_budget) {
            std::ostringstream os;
            os << "evolve: substep controller exceeded " << substep_budget
               << " steps at t=" << ta << "; refine the grid or raise n_t";
            throw std::runtime_error(os.str());
        }

        const double dt_sub = (tb - ta) / m;
        for (int j = 0; j < m; ++j) {
            const double t_lo = ta + j * dt_sub;
            const double t_hi = (j + 1 == m) ? tb : t_lo + dt_sub;

            StepCoeffs sc{};
            if (harmonic) {
                const double dmid = (*dh)(0.5 * (t_lo + t_hi));
                const double rh = dmid * dt_sub / (2.0 * dx * dx);
                sc.l_sub = rh;
                sc.l_super = rh;
                sc.l_diag = -2.0 * rh + drift.omega * dt_sub / 4.0;
                sc.phi = drift.omega * dt_sub / (4.0 * dx);
            } else {
                const double var_hi = kernel::variance_series(p, t_hi);
                const double rn = (var_hi - var_lo) / (4.0 * dx * dx);
                var_lo = var_hi;
                const double theta = linear ? drift.g * dt_sub / (4.0 * dx) : 0.0;
                sc.l_sub = rn + theta;
                sc.l_super = rn - theta;
                sc.l_diag = -2.0 * rn;
            }

            cn_substep(pv, sc, grid, a, b, c, r);
            ++st.n_substeps;

            const double mn = pv.minCoeff();
            st.min_density = std::min(st.min_density, mn);
            if (mn < -1e-12) {
                for (int k = 1; k + 1 < n; ++k) {
                    if (pv[k] < -1e-12) {
                        pv[k] = 0.0;
                        ++st.clipped;
                    }
                }
            }

            const double drift_mass = std::abs(trapezoid_mass(pv, dx) - 1.0);
            st.max_mass_drift = std::max(st.max_mass_drift, drift_mass);
            if (drift_mass > 1e-6) {
                std::ostringstream os;
                os << "evolve: mass drift " << drift_mass << " at t=" << t_hi
                   << " exceeds 1e-6";
                throw std::runtime_error(os.str());
            }
        }
    }

    for (int k = 0; k < n; ++k) {
        pv[k] = std::max(pv[k], 0.0);
    }
    if (stats != nullptr) {
        *stats = st;
    }
    return {pv, grid.t1};
}

}  // namespace fpe
}  // namespace fou2
