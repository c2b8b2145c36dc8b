#include "fou2/specfun.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fou2 {
namespace specfun {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
// Floor for relative-error tests when the value itself is denormal or zero.
constexpr double kValueGuard = std::numeric_limits<double>::min();
// One ulp of the long double accumulator.
constexpr long double kEpsL = 1.084e-19L;

std::string fmt_args(const char* name, double a, double b, double c, double z) {
    std::ostringstream os;
    os << name << "(alpha=" << a << ", beta=" << b << ", gamma=" << c
       << ", z=" << z << ")";
    return os.str();
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("ln_gamma: requires x > 0");
    }
    return static_cast<double>(lgammal(static_cast<long double>(x)));
}

long double ln_gamma_l(long double x) { return lgammal(x); }

long double sin_pi_l(long double x) {
    long double n = nearbyintl(x);
    long double r = x - n;
    long double s = sinl(kPiL * r);
    long long parity = static_cast<long long>(n);
    return (parity % 2 == 0) ? s : -s;
}

long double inv_gamma_l(long double x) {
    if (x > 0.0L) {
        return expl(-lgammal(x));
    }
    if (x == floorl(x)) {
        return 0.0L;  // poles of Gamma at 0, -1, -2, ...
    }
    // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi for non-integer x <= 0.
    return sin_pi_l(x) * expl(lgammal(1.0L - x)) / kPiL;
}

double inv_gamma(double x) {
    if (std::isnan(x)) {
        throw std::domain_error("inv_gamma: requires finite x");
    }
    return static_cast<double>(inv_gamma_l(static_cast<long double>(x)));
}

double gen_binom(double g, int n) {
    if (!(g > 0.0 && g <= 1.0)) {
        throw std::domain_error("gen_binom: requires g in (0, 1]");
    }
    if (n < 0) {
        throw std::domain_error("gen_binom: requires n >= 0");
    }
    if (n == 0 || g == 1.0) {
        return 1.0;
    }
    long double gl = static_cast<long double>(g);
    long double v = expl(lgammal(gl + n) - lgammal(gl) - lgammal(static_cast<long double>(n) + 1.0L));
    return static_cast<double>(v);
}

namespace {

struct HypResult {
    long double value;
    long double tail;
    int terms;
};

HypResult hyp2f1_core(double a, double c, double x, const SeriesControl& ctl) {
    if (!std::isfinite(a)) {
        throw std::domain_error("hyp2f1_unit_b: requires finite a");
    }
    if (!(c > 0.0)) {
        throw std::domain_error("hyp2f1_unit_b: requires c > 0");
    }
    if (!(x >= 0.0 && x < 1.0)) {
        throw std::domain_error("hyp2f1_unit_b: requires x in [0, 1)");
    }
    if (x == 0.0 || a == 0.0) {
        return {1.0L, 0.0L, 1};
    }

    // Both branches sum series with term ratio tending to x from one side.
    // Direct series for a > 0 has all-positive terms.  For a < 0 the direct
    // terms alternate with catastrophic cancellation when |a| is large, so
    // the series is rewritten through the Euler transform
    //   2F1(a, 1, c; x) = (1-x)^(c-a-1) 2F1(c-a, c-1, c; x)
    // whose terms are sign-stable.
    const long double xl = static_cast<long double>(x);
    long double pref = 1.0L;
    long double p_num1, p_num2;  // term ratio: (p_num1+k)(p_num2+k) / ((c+k)(q_den+k)) * x
    long double q_den;
    const long double cl = static_cast<long double>(c);
    if (a > 0.0) {
        p_num1 = static_cast<long double>(a);
        p_num2 = std::numeric_limits<long double>::quiet_NaN();  // unused
        q_den = 0.0L;  // ratio = (a+k)/(c+k) * x
    } else {
        const long double al = static_cast<long double>(a);
        pref = powl(1.0L - xl, cl - al - 1.0L);
        p_num1 = cl - al;
        p_num2 = cl - 1.0L;
        q_den = 1.0L;  // ratio = (A+k)(B+k)/((c+k)(1+k)) * x
    }

    long double sum = 0.0L;
    long double t = 1.0L;
    int consec = 0;
    const double rtol = ctl.rel_tol;
    for (int k = 0; k < ctl.max_terms; ++k) {
        sum += t;
        long double ratio;
        if (a > 0.0) {
            ratio = (p_num1 + k) / (cl + k) * xl;
        } else {
            ratio = (p_num1 + k) * (p_num2 + k) / ((cl + k) * (q_den + k)) * xl;
        }
        long double t_next = t * ratio;
        if (fabsl(t_next) > 1e4000L) {
            throw SeriesError("hyp2f1_unit_b: term overflow before convergence");
        }
        long double r_bound = fmaxl(xl, fabsl(ratio));
        if (r_bound < 1.0L) {
            long double tail = fabsl(t_next) / (1.0L - r_bound);
            long double scale = fmaxl(fabsl(sum), static_cast<long double>(kValueGuard) / fmaxl(pref, 1e-4000L));
            if (tail <= rtol * scale) {
                ++consec;
                if (consec >= 3 || a > 0.0) {
                    // a > 0: r_bound is a rigorous sup of all future ratios.
                    return {pref * sum, pref * tail, k + 1};
                }
            } else {
                consec = 0;
            }
        } else {
            consec = 0;
        }
        t = t_next;
    }
    std::ostringstream os;
    os << "hyp2f1_unit_b: no convergence after " << ctl.max_terms
       << " terms (a=" << a << ", c=" << c << ", x=" << x << ")";
    throw SeriesError(os.str());
}

}  // namespace

SeriesResult hyp2f1_unit_b(double a, double c, double x, const SeriesControl& ctl) {
    const HypResult h = hyp2f1_core(a, c, x, ctl);
    return {static_cast<double>(h.value), h.terms, true, static_cast<double>(h.tail)};
}

long double hyp2f1_unit_b_l(double a, double c, double x, const SeriesControl& ctl) {
    return hyp2f1_core(a, c, x, ctl).value;
}

double hyp2f1_at_one(double a, double c) {
    if (!(c > 0.0)) {
        throw std::domain_error("hyp2f1_at_one: requires c > 0");
    }
    if (!(c - a - 1.0 > 0.0)) {
        throw std::domain_error("hyp2f1_at_one: requires c - a - 1 > 0");
    }
    const long double al = static_cast<long double>(a);
    const long double cl = static_cast<long double>(c);
    long double v = expl(lgammal(cl) + lgammal(cl - al - 1.0L) - lgammal(cl - al)) *
                    inv_gamma_l(cl - 1.0L);
    return static_cast<double>(v);
}

namespace {

struct RouteResult {
    long double value = 0.0L;
    long double err = std::numeric_limits<long double>::infinity();
    int terms = 0;
    bool valid = false;
};

// Power series sum_n (gamma)_n / n! z^n / Gamma(alpha n + beta).
RouteResult prabhakar_series(long double alpha, long double beta, long double gamma,
                             long double z, int cap) {
    RouteResult r;
    long double g = 1.0L;   // (gamma)_n / n!
    long double zn = 1.0L;  // z^n
    long double sum = 0.0L;
    long double maxterm = 0.0L;
    long double t = 0.0L;
    int consec = 0;
    int n = 0;
    for (; n < cap; ++n) {
        t = g * zn * inv_gamma_l(alpha * n + beta);
        sum += t;
        maxterm = fmaxl(maxterm, fabsl(t));
        if (n > 8 && fabsl(t) <= 1e-21L * maxterm) {
            if (++consec >= 3) {
                ++n;
                break;
            }
        } else {
            consec = 0;
        }
        g *= (gamma + n) / (n + 1.0L);
        zn *= z;
        if (fabsl(zn) > 1e4000L) {
            return r;  // overflow before convergence; route unusable
        }
    }
    if (consec < 3) {
        return r;
    }
    r.value = sum;
    // Positive-definite peak dominates the rounding floor; truncated tail is
    // below 1e-21 * maxterm by the stopping rule.
    r.err = maxterm * 2.0L * kEpsL + fabsl(t);
    r.terms = n;
    r.valid = true;
    return r;
}

// Algebraic large-argument expansion in powers of 1/x, truncated at the
// smallest term: E^g_{a,b}(-x) ~ sum_k (-1)^k (g)_k / k! x^(-g-k) / Gamma(b - a(g+k)).
RouteResult prabhakar_asymptotic(long double alpha, long double beta, long double gamma,
                                 long double x, int kmax) {
    RouteResult r;
    long double c = 1.0L;  // (gamma)_k / k!
    long double sum = 0.0L;
    long double prev_mag = std::numeric_limits<long double>::infinity();
    long double maxkept = 0.0L;
    long double omitted = 0.0L;
    int kept = 0;
    for (int k = 0; k <= kmax; ++k) {
        // Terms whose Gamma argument lands on a pole vanish analytically;
        // snap near-pole arguments (rounding residue of alpha (gamma + k))
        // so they do not derail the smallest-term truncation.
        const long double d = beta - alpha * (gamma + k);
        const long double dn = nearbyintl(d);
        long double ig = 0.0L;
        if (!(dn <= 0.0L && fabsl(d - dn) < 1e-13L)) {
            ig = inv_gamma_l(d);
        }
        long double t = c * powl(x, -gamma - k) * ig;
        if (k % 2 == 1) {
            t = -t;
        }
        if (!std::isfinite(t)) {
            omitted = prev_mag;
            break;
        }
        long double at = fabsl(t);
        if (at != 0.0L) {
            if (at >= prev_mag) {
                omitted = at;  // smallest-term truncation
                break;
            }
            prev_mag = at;
            maxkept = fmaxl(maxkept, at);
            sum += t;
            ++kept;
            omitted = at;
        }
        c *= (gamma + k) / (k + 1.0L);
    }
    if (kept == 0) {
        return r;
    }
    r.value = sum;
    // Truncation error (first omitted term) plus a rounding budget for the
    // chained powl/lgammal/expl evaluations of the kept terms.
    r.err = omitted + maxkept * 2e-17L * sqrtl(static_cast<long double>(kept)) +
            fabsl(sum) * kEpsL;
    r.terms = kept;
    r.valid = true;
    return r;
}

}  // namespace

SeriesResult prabhakar(double alpha, double beta, double gamma, double z,
                       const SeriesControl& ctl) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::domain_error("prabhakar: requires alpha in (0, 1]");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::domain_error("prabhakar: requires gamma in (0, 1]");
    }
    if (!std::isfinite(beta)) {
        throw std::domain_error("prabhakar: requires finite beta");
    }
    if (!(z <= 0.0)) {
        throw std::domain_error("prabhakar: requires z <= 0");
    }
    if (z == 0.0) {
        return {inv_gamma(beta), 1, true, 0.0};
    }

    const long double al = static_cast<long double>(alpha);
    const long double bl = static_cast<long double>(beta);
    const long double gl = static_cast<long double>(gamma);
    const long double zl = static_cast<long double>(z);

    if (alpha == 1.0) {
        // Confluent reduction: E^g_{1,b}(z) = e^z sum_k (b-g)_k (-z)^k / (k! Gamma(b+k)).
        const long double x = -zl;
        long double q = 1.0L;  // (b-g)_k x^k / k!
        long double sum = 0.0L;
        long double maxterm = 0.0L;
        const double rtol = ctl.rel_tol;
        for (int k = 0; k < ctl.max_terms; ++k) {
            long double t = q * inv_gamma_l(bl + k);
            sum += t;
            maxterm = fmaxl(maxterm, fabsl(t));
            long double q_next = q * (bl - gl + k) * x / (k + 1.0L);
            if (q_next == 0.0L) {
                // terminating series: (b-g)_k hit zero
                long double v = expl(zl) * sum;
                return {static_cast<double>(v), k + 1, true,
                        static_cast<double>(expl(zl) * maxterm * kEpsL)};
            }
            long double t_next = fabsl(q_next) * fabsl(inv_gamma_l(bl + k + 1.0L));
            long double rho = fabsl((bl - gl + k + 1.0L) * x / ((k + 2.0L) * (bl + k + 1.0L)));
            if (rho < 1.0L) {
                long double tail = t_next / (1.0L - rho) + maxterm * kEpsL;
                long double scale = fmaxl(fabsl(sum), static_cast<long double>(kValueGuard));
                if (tail <= rtol * scale) {
                    long double v = expl(zl) * sum;
                    return {static_cast<double>(v), k + 1, true,
                            static_cast<double>(expl(zl) * tail)};
                }
            }
            if (fabsl(q_next) > 1e4000L) {
                break;
            }
            q = q_next;
        }
        throw SeriesError(fmt_args("prabhakar: confluent series did not converge",
                                   alpha, beta, gamma, z));
    }

    // alpha < 1: pick the better of the power series and the algebraic
    // large-argument expansion by their self-reported errors.
    const long double x = -zl;
    RouteResult series;
    RouteResult asym;
    if (x <= 40.0L) {
        series = prabhakar_series(al, bl, gl, zl, std::max(ctl.max_terms, 4000));
    }
    if (x > 6.0L) {
        asym = prabhakar_asymptotic(al, bl, gl, x, 120);
    }
    const RouteResult* best = nullptr;
    if (series.valid && (!asym.valid || series.err <= asym.err)) {
        best = &series;
    } else if (asym.valid) {
        best = &asym;
    }
    if (best == nullptr) {
        throw SeriesError(fmt_args("prabhakar: no usable evaluation route",
                                   alpha, beta, gamma, z));
    }
    long double scale = fmaxl(fabsl(best->value), static_cast<long double>(kValueGuard));
    if (best->err > ctl.rel_tol * scale) {
        std::ostringstream os;
        os << fmt_args("prabhakar: tolerance not met", alpha, beta, gamma, z)
           << ": relative error ~" << static_cast<double>(best->err / scale)
           << " vs rel_tol " << ctl.rel_tol;
        throw SeriesError(os.str());
    }
    return {static_cast<double>(best->value), best->terms, true,
            static_cast<double>(best->err)};
}

}  // namespace specfun
}  // namespace fou2
