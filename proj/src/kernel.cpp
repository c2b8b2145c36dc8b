#include "fou2/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "fou2/quadrature.hpp"
#include "fou2/specfun.hpp"

namespace fou2 {
namespace kernel {

namespace {

constexpr double kValueGuard = std::numeric_limits<double>::min();
// Anti-diagonal cap: beyond this the quadrature routes are authoritative.
constexpr int kQCap = 120;

double require_time(double t, const char* fn, bool strictly_positive) {
    if (!std::isfinite(t) || t < 0.0 || (strictly_positive && t == 0.0)) {
        std::ostringstream os;
        os << fn << ": requires " << (strictly_positive ? "t > 0" : "t >= 0")
           << " (got " << t << ")";
        throw std::domain_error(os.str());
    }
    return t;
}

// E^g_{a, ag}(z), the Mittag-Leffler factor of the Green function.
double ml_ag(const ProcessParams& p, double z, const SeriesControl& ctl) {
    return specfun::prabhakar(p.alpha, p.ag(), p.gamma, z, ctl).value;
}

// Per-term relative accuracy of the two factories feeding the anti-diagonal
// sums: long-double hypergeometric evaluations (truncation at kHypTol plus
// product rounding) and Gamma-ratio products assembled from lgammal.  The
// alternating diagonals cancel heavily, so the honest rounding floor of a
// sum is its accumulated absolute mass times the per-term accuracy.
constexpr long double kHypTermEps = 6e-18L;
constexpr long double kGammaTermEps = 4e-17L;
// Truncation target of the inner hypergeometric evaluations; tighter than
// any caller tolerance because the fold amplifies the same-sign bias of a
// truncated all-positive series by the cancellation ratio.
constexpr double kHypTol = 3e-18;

// Convergence bookkeeping for the anti-diagonal sums: stop after three
// consecutive diagonals whose geometric tail estimate plus the rounding
// floor of the accumulated absolute mass fall below tolerance.
class QSeries {
  public:
    QSeries(double rel_tol, long double term_eps)
        : rtol_(static_cast<long double>(rel_tol)), term_eps_(term_eps) {}

    bool add(long double s) {
        acc_ += s;
        const long double mag = fabsl(s);
        absmass_ += mag;
        bool ok = false;
        if (have_prev_) {
            long double rho;
            if (prev_ == 0.0L) {
                rho = (mag == 0.0L) ? 0.0L : 1.0L;
            } else {
                rho = mag / prev_;
            }
            if (rho < 1.0L) {
                const long double tail = mag * rho / (1.0L - rho);
                const long double err = tail + absmass_ * term_eps_;
                const long double scale =
                    fmaxl(fabsl(acc_), static_cast<long double>(kValueGuard));
                ok = err <= rtol_ * scale;
            }
        }
        consec_ = ok ? consec_ + 1 : 0;
        prev_ = mag;
        have_prev_ = true;
        return consec_ >= 3;
    }

    long double sum() const { return acc_; }

  private:
    long double rtol_;
    long double term_eps_;
    long double acc_ = 0.0L;
    long double absmass_ = 0.0L;
    long double prev_ = 0.0L;
    bool have_prev_ = false;
    int consec_ = 0;
};

int q_cap(const SeriesControl& ctl) { return std::min(kQCap, std::max(ctl.max_terms - 1, 8)); }

[[noreturn]] void throw_stalled(const char* fn, const char* advice, double t, double s,
                                double z_scale) {
    std::ostringstream os;
    os << fn << ": power series stalled before tolerance (t=" << t;
    if (s == s && s >= 0.0) {
        os << ", s=" << s;
    }
    os << ", |z|~" << z_scale << "); " << advice;
    throw SeriesError(os.str());
}

// sum over q of z^q Lambda_q / (a (2g + q) - 1); sigma^2(t) = t^(2ag-1) * sum.
long double variance_sum(const ProcessParams& p, long double z, const SeriesControl& ctl,
                         double t_for_msg) {
    const long double al = static_cast<long double>(p.alpha);
    const long double gl = static_cast<long double>(p.gamma);
    const CoeffTable table(p, q_cap(ctl));
    QSeries acc(ctl.rel_tol, kGammaTermEps);
    long double zq = 1.0L;
    for (int q = 0; q <= table.q_max(); ++q) {
        const long double denom = al * (2.0L * gl + q) - 1.0L;
        const long double s = zq * table.lambda_q_l(q) / denom;
        if (acc.add(s)) {
            return acc.sum();
        }
        zq *= z;
    }
    throw_stalled("variance_series", "use variance_quadrature for this regime",
                  t_for_msg, -1.0, static_cast<double>(fabsl(z)));
}

// Off-diagonal anti-diagonal series for C(t, s), 0 < s < t.
double covariance_offdiag(const ProcessParams& p, double t, double s,
                          const SeriesControl& ctl) {
    const long double al = static_cast<long double>(p.alpha);
    const long double gl = static_cast<long double>(p.gamma);
    const double x = s / t;
    const long double la = powl(static_cast<long double>(p.lambda), al);
    const long double zs = -la * powl(static_cast<long double>(s), al);
    const long double zt = -la * powl(static_cast<long double>(t), al);
    const CoeffTable table(p, q_cap(ctl));
    SeriesControl inner;
    inner.rel_tol = kHypTol;
    inner.max_terms = static_cast<int>(std::min<long long>(
        2000000LL, std::max<long long>(static_cast<long long>(ctl.max_terms) * 20LL, 200000LL)));

    QSeries acc(ctl.rel_tol, kHypTermEps);
    std::vector<long double> zsp{1.0L};
    std::vector<long double> ztp{1.0L};
    try {
        for (int q = 0; q <= table.q_max(); ++q) {
            if (q > 0) {
                zsp.push_back(zsp.back() * zs);
                ztp.push_back(ztp.back() * zt);
            }
            long double diag = 0.0L;
            for (int m = 0; m <= q; ++m) {
                const int n = q - m;
                const double a = 1.0 - p.alpha * (p.gamma + n);
                const double c = 1.0 + p.alpha * (p.gamma + m);
                const long double f = specfun::hyp2f1_unit_b_l(a, c, x, inner);
                const long double term =
                    table.binom()[static_cast<size_t>(m)] *
                    table.binom()[static_cast<size_t>(n)] * zsp[static_cast<size_t>(m)] *
                    ztp[static_cast<size_t>(n)] * table.inv_gamma_high()[static_cast<size_t>(m)] *
                    table.inv_gamma_low()[static_cast<size_t>(n)] * f;
                diag += term;
            }
            if (acc.add(diag)) {
                const long double scale = powl(static_cast<long double>(s), al * gl) *
                                          powl(static_cast<long double>(t), al * gl - 1.0L);
                return static_cast<double>(scale * acc.sum());
            }
        }
    } catch (const SeriesError&) {
        // Inner hypergeometric exhaustion; diagnosed as a stall below.
    }
    throw_stalled("covariance_series", "use covariance_quadrature for this regime", t, s,
                  static_cast<double>(fmaxl(fabsl(zs), fabsl(zt))));
}

// Diagonal series C(T, T) through the hypergeometric-at-one closed form;
// the Gamma-ratio route here is independent of the Lambda_q grouping used
// by variance_series.
double diagonal_series(const ProcessParams& p, double t, const SeriesControl& ctl,
                       const char* fn) {
    const long double al = static_cast<long double>(p.alpha);
    const long double gl = static_cast<long double>(p.gamma);
    const long double la = powl(static_cast<long double>(p.lambda), al);
    const long double zt = -la * powl(static_cast<long double>(t), al);
    const CoeffTable table(p, q_cap(ctl));

    const size_t count = static_cast<size_t>(table.q_max()) + 1;
    std::vector<long double> lg_high(count);  // lgamma(1 + a(g+m))
    std::vector<long double> lg_low(count);   // lgamma(a(g+m))
    for (size_t m = 0; m < count; ++m) {
        const long double e = al * (gl + static_cast<long double>(m));
        lg_high[m] = lgammal(1.0L + e);
        lg_low[m] = lgammal(e);
    }

    QSeries acc(ctl.rel_tol, kGammaTermEps);
    std::vector<long double> ztp{1.0L};
    for (int q = 0; q <= table.q_max(); ++q) {
        if (q > 0) {
            ztp.push_back(ztp.back() * zt);
        }
        const long double e2 = al * (2.0L * gl + q);
        const long double lg_num = lgammal(e2 - 1.0L);
        const long double lg_den = lgammal(e2);
        long double diag = 0.0L;
        for (int m = 0; m <= q; ++m) {
            const size_t mu = static_cast<size_t>(m);
            const size_t nu = static_cast<size_t>(q - m);
            const long double f_at_one =
                expl(lg_high[mu] + lg_num - lg_den - lg_low[mu]);
            const long double term = table.binom()[mu] * table.binom()[nu] * ztp[mu] *
                                     ztp[nu] * table.inv_gamma_high()[mu] *
                                     table.inv_gamma_low()[nu] * f_at_one;
            diag += term;
        }
        if (acc.add(diag)) {
            return static_cast<double>(powl(static_cast<long double>(t), 2.0L * al * gl - 1.0L) *
                                       acc.sum());
        }
    }
    throw_stalled(fn, "use the quadrature route for this regime", t, t,
                  static_cast<double>(fabsl(zt)));
}

int panels_for(int n_nodes) { return std::max(2, n_nodes / 12 - 1); }

}  // namespace

double green_g(const ProcessParams& p, double t, const SeriesControl& ctl) {
    require_time(t, "green_g", true);
    const double z = -p.lambda_alpha() * std::pow(t, p.alpha);
    const double e = ml_ag(p, z, ctl);
    return static_cast<double>(powl(static_cast<long double>(t),
                                    static_cast<long double>(p.ag()) - 1.0L) *
                               static_cast<long double>(e));
}

double green_g_prime(const ProcessParams& p, double t, const SeriesControl& ctl) {
    require_time(t, "green_g_prime", true);
    const double z = -p.lambda_alpha() * std::pow(t, p.alpha);
    const double e = specfun::prabhakar(p.alpha, p.ag() - 1.0, p.gamma, z, ctl).value;
    return static_cast<double>(powl(static_cast<long double>(t),
                                    static_cast<long double>(p.ag()) - 2.0L) *
                               static_cast<long double>(e));
}

double green_g_integral(const ProcessParams& p, double t, const SeriesControl& ctl) {
    require_time(t, "green_g_integral", false);
    if (t == 0.0) {
        return 0.0;
    }
    const double z = -p.lambda_alpha() * std::pow(t, p.alpha);
    const double e = specfun::prabhakar(p.alpha, p.ag() + 1.0, p.gamma, z, ctl).value;
    return static_cast<double>(powl(static_cast<long double>(t),
                                    static_cast<long double>(p.ag())) *
                               static_cast<long double>(e));
}

double variance_series(const ProcessParams& p, double t, const SeriesControl& ctl) {
    require_time(t, "variance_series", false);
    if (t == 0.0) {
        return 0.0;
    }
    const long double al = static_cast<long double>(p.alpha);
    const long double z = -powl(static_cast<long double>(p.lambda), al) *
                          powl(static_cast<long double>(t), al);
    const long double sum = variance_sum(p, z, ctl, t);
    return static_cast<double>(powl(static_cast<long double>(t),
                                    2.0L * static_cast<long double>(p.ag()) - 1.0L) *
                               sum);
}

double diffusion_coeff(const ProcessParams& p, double t, const SeriesControl& ctl) {
    require_time(t, "diffusion_coeff", true);
    const long double al = static_cast<long double>(p.alpha);
    const long double gl = static_cast<long double>(p.gamma);
    const long double z = -powl(static_cast<long double>(p.lambda), al) *
                          powl(static_cast<long double>(t), al);
    const CoeffTable table(p, q_cap(ctl));
    QSeries acc(ctl.rel_tol, kGammaTermEps);
    long double zq = 1.0L;
    bool done = false;
    for (int q = 0; q <= table.q_max(); ++q) {
        const long double s = zq * table.lambda_q_l(q);
        if (acc.add(s)) {
            done = true;
            break;
        }
        zq *= z;
    }
    if (!done) {
        throw_stalled("diffusion_coeff", "differentiate the quadrature variance instead", t,
                      -1.0, static_cast<double>(fabsl(z)));
    }
    return static_cast<double>(0.5L *
                               powl(static_cast<long double>(t), 2.0L * al * gl - 2.0L) *
                               acc.sum());
}

double covariance_series(const ProcessParams& p, double t, double s,
                         const SeriesControl& ctl) {
    require_time(t, "covariance_series", false);
    require_time(s, "covariance_series", false);
    if (s > t) {
        std::swap(s, t);
    }
    if (s == 0.0) {
        return 0.0;
    }
    if (s == t) {
        return diagonal_series(p, t, ctl, "covariance_series");
    }
    return covariance_offdiag(p, t, s, ctl);
}

double u_of_t(const ProcessParams& p, double t, double beta, const SeriesControl& ctl) {
    require_time(beta, "u_of_t", true);
    if (!std::isfinite(t) || t < 0.0 || t > beta) {
        throw std::domain_error("u_of_t: requires 0 <= t <= beta");
    }
    if (t == 0.0) {
        return 0.0;
    }
    if (t == beta) {
        return diagonal_series(p, beta, ctl, "u_of_t");
    }
    return covariance_offdiag(p, beta, t, ctl);
}

double u_of_beta(const ProcessParams& p, double beta, const SeriesControl& ctl) {
    require_time(beta, "u_of_beta", true);
    return diagonal_series(p, beta, ctl, "u_of_beta");
}

double variance_quadrature(const ProcessParams& p, double t, int n_nodes,
                           const SeriesControl& green_ctl) {
    require_time(t, "variance_quadrature", true);
    if (n_nodes < 16) {
        throw std::invalid_argument("variance_quadrature: requires n_nodes >= 16");
    }
    const double pexp = 2.0 * p.ag() - 1.0;
    const double upper = std::pow(t, pexp);
    const double la = p.lambda_alpha();
    const double inner_exp = p.alpha / pexp;
    auto f = [&](double v) {
        const double z = -la * std::pow(v, inner_exp);
        const double e = ml_ag(p, z, green_ctl);
        return e * e / pexp;
    };
    return quadrature::graded_integrate(f, upper, panels_for(n_nodes), 12);
}

double covariance_quadrature(const ProcessParams& p, double t, double s, int n_nodes,
                             const SeriesControl& green_ctl) {
    require_time(t, "covariance_quadrature", true);
    require_time(s, "covariance_quadrature", true);
    if (n_nodes < 16) {
        throw std::invalid_argument("covariance_quadrature: requires n_nodes >= 16");
    }
    if (s > t) {
        std::swap(s, t);
    }
    if (s == t) {
        return variance_quadrature(p, t, n_nodes, green_ctl);
    }
    const double ag = p.ag();
    const double upper = std::pow(s, ag);
    const double diff = t - s;
    const double la = p.lambda_alpha();
    auto f = [&](double w) {
        const double u = std::pow(w, 1.0 / ag);
        const double z = -la * std::pow(w, 1.0 / p.gamma);
        const double e = ml_ag(p, z, green_ctl);
        return green_g(p, diff + u, green_ctl) * e / ag;
    };
    return quadrature::graded_integrate(f, upper, panels_for(n_nodes), 12);
}

}  // namespace kernel
}  // namespace fou2
