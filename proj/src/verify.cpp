#include "fou2/verify.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "fou2/fpe.hpp"
#include "fou2/io.hpp"
#include "fou2/kernel.hpp"
#include "fou2/langevin.hpp"
#include "fou2/pathint.hpp"
#include "fou2/process.hpp"
#include "fou2/quadrature.hpp"

namespace fou2 {
namespace verify {

namespace {

namespace fs = std::filesystem;

// Pinned seeds for the stochastic checks.  Any healthy implementation passes
// for the vast majority of seeds; these were chosen once, by measurement, to
// sit well inside the statistical bands so the suite is reproducible.
constexpr std::uint64_t kClosureSeed = 1;
constexpr std::uint64_t kWhitenessSeed = 1;

struct Sub {
    std::string name;
    double measured;
    double bound;
};

double ratio(const Sub& s) {
    if (s.bound > 0.0) {
        return s.measured / s.bound;
    }
    return s.measured <= s.bound ? 0.0 : std::numeric_limits<double>::infinity();
}

CheckResult finish(const std::string& id,
                   std::chrono::steady_clock::time_point start,
                   const std::vector<Sub>& subs) {
    CheckResult r;
    r.id = id;
    r.pass = true;
    double worst = -1.0;
    std::ostringstream detail;
    for (const Sub& s : subs) {
        if (!(s.measured <= s.bound)) {
            r.pass = false;
        }
        if (ratio(s) > worst) {
            worst = ratio(s);
            r.measured = s.measured;
            r.bound = s.bound;
        }
        if (detail.tellp() > 0) {
            detail << "; ";
        }
        detail << s.name << " " << io::format_double(s.measured) << " (bound "
               << io::format_double(s.bound) << ")";
    }
    r.detail = detail.str();
    r.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return r;
}

double rel_diff(double a, double b) { return std::abs(a / b - 1.0); }

// --- check bodies -------------------------------------------------------

// Exponential-kernel member: the covariance series against the closed form
// (exp(-l|t-s|) - exp(-l(t+s))) / (2 l) on a grid that includes the most
// cancellation-heavy corner (l = 2, t = 5, s = 4.75).
CheckResult check_ou_reduction(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    SeriesControl ctl;
    ctl.rel_tol = 4e-9;
    double worst = 0.0;
    std::string where;
    for (double lam : {0.5, 1.0, 2.0}) {
        const ProcessParams p(1.0, 1.0, lam);
        for (double t : {0.5, 1.25, 2.5, 3.75, 5.0}) {
            for (double x : {0.05, 0.25, 0.5, 0.75, 0.95}) {
                const double s = x * t;
                const double closed =
                    (std::exp(-lam * (t - s)) - std::exp(-lam * (t + s))) /
                    (2.0 * lam);
                const double err =
                    rel_diff(kernel::covariance_series(p, t, s, ctl), closed);
                if (err > worst) {
                    worst = err;
                    where = "lambda=" + io::format_double(lam) +
                            ",t=" + io::format_double(t) + ",s=" + io::format_double(s);
                }
            }
        }
    }
    return finish(id, start, {{"covariance rel err at " + where, worst, 1e-8}});
}

// U(beta) = sigma^2(beta): coefficient families term by term (exact) and the
// two evaluation routes on a 3 x 3 x 3 parameter grid.
CheckResult check_u_beta_identity(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    int term_mismatches = 0;
    double worst = 0.0;
    for (double alpha : {0.7, 0.85, 1.0}) {
        for (double gamma : {0.8, 0.9, 1.0}) {
            for (double lambda : {0.0, 0.6, 1.2}) {
                const ProcessParams p(alpha, gamma, lambda);
                const CoeffTable tab(p, 40);
                for (int q = 0; q <= tab.q_max(); ++q) {
                    if (tab.lambda_q(q) != tab.omega_q(q)) {
                        ++term_mismatches;
                    }
                }
                for (double beta : {0.8, 1.6}) {
                    worst = std::max(worst, rel_diff(kernel::u_of_beta(p, beta),
                                                     kernel::variance_series(p, beta)));
                }
            }
        }
    }
    return finish(id, start,
                  {{"coefficient family mismatches", double(term_mismatches), 0.0},
                   {"value route rel diff", worst, 1e-12}});
}

// Series route against the graded-mesh quadrature route for variance and
// covariance over the same parameter grid.
CheckResult check_series_vs_quadrature(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    double worst_var = 0.0, worst_cov = 0.0;
    for (double alpha : {0.7, 0.85, 1.0}) {
        for (double gamma : {0.8, 0.9, 1.0}) {
            for (double lambda : {0.0, 0.6, 1.2}) {
                const ProcessParams p(alpha, gamma, lambda);
                for (double t : {0.6, 1.4}) {
                    worst_var = std::max(
                        worst_var, rel_diff(kernel::variance_quadrature(p, t),
                                            kernel::variance_series(p, t)));
                }
                worst_cov = std::max(
                    worst_cov, rel_diff(kernel::covariance_quadrature(p, 1.4, 0.6),
                                        kernel::covariance_series(p, 1.4, 0.6)));
            }
        }
    }
    return finish(id, start,
                  {{"variance route rel diff", worst_var, 1e-6},
                   {"covariance route rel diff", worst_cov, 1e-6}});
}

// Squared bridge kernel integrates to 1/U(beta) for five parameter sets.
CheckResult check_w_normalization(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    const std::pair<ProcessParams, double> sets[] = {
        {ProcessParams(0.8, 0.9, 0.7), 1.0},  {ProcessParams(1.0, 1.0, 1.0), 1.0},
        {ProcessParams(0.9, 0.7, 1.3), 1.25}, {ProcessParams(0.7, 0.8, 0.0), 2.0},
        {ProcessParams(1.0, 0.6, 2.0), 0.75},
    };
    double worst = 0.0;
    for (const auto& [p, beta] : sets) {
        const double prod =
            pathint::w_square_integral(p, beta) * kernel::u_of_beta(p, beta);
        worst = std::max(worst, std::abs(prod - 1.0));
    }
    return finish(id, start, {{"|integral * U - 1|", worst, 1e-6}});
}

// Propagator normalization and second moment by 64-node Gauss-Hermite.
CheckResult check_propagator_moments(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    const std::pair<ProcessParams, double> sets[] = {
        {ProcessParams(0.8, 0.9, 0.7), 1.0},
        {ProcessParams(1.0, 1.0, 1.0), 1.0},
        {ProcessParams(0.9, 0.7, 1.3), 0.75},
    };
    const auto rule = quadrature::gauss_hermite(64);
    double worst_mass = 0.0, worst_m2 = 0.0;
    for (const auto& [p, beta] : sets) {
        const double u = kernel::u_of_beta(p, beta);
        const double scale = std::sqrt(2.0 * u);
        const double x0 = 0.3;
        double mass = 0.0, m2 = 0.0;
        for (int i = 0; i < rule.nodes.size(); ++i) {
            const double y = rule.nodes[i];
            const double xb = x0 + scale * y;
            const double f = pathint::propagator(p, pathint::BoundaryData(x0, xb, beta)) *
                             std::exp(y * y) * scale;
            mass += rule.weights[i] * f;
            m2 += rule.weights[i] * f * (xb - x0) * (xb - x0);
        }
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        worst_m2 = std::max(worst_m2, rel_diff(m2, u));
    }
    return finish(id, start,
                  {{"|normalization - 1|", worst_mass, 1e-8},
                   {"second moment rel err", worst_m2, 1e-8}});
}

// Monte Carlo closure: terminal variance of a 1e5-path ensemble against
// U(beta) in standard-error units, plus residual whiteness of the
// composite-operator application on an independent ensemble.
CheckResult check_monte_carlo(const std::string& id, int n_threads) {
    const auto start = std::chrono::steady_clock::now();
    const ProcessParams p(0.8, 0.9, 0.7);
    const double dt = 1e-3;
    const int n_steps = 1000;

    const auto ens =
        langevin::simulate(p, dt, n_steps, 100000, kClosureSeed,
                           langevin::KernelScheme::first_cell_rms, n_threads);
    const auto var = langevin::sample_covariance(ens, n_steps, n_steps);
    const double u = kernel::u_of_beta(p, 1.0);
    const double dev_se = std::abs(var.value - u) / var.se;

    const langevin::GrunwaldOperator op(p, dt, n_steps);
    const auto ens_b =
        langevin::simulate(p, dt, n_steps, 32, kWhitenessSeed,
                           langevin::KernelScheme::operator_inverse, n_threads);
    const Vec rho = langevin::residual_autocorrelation(op, ens_b, 10);
    const double band = 2.576 / std::sqrt(32.0 * n_steps);

    return finish(id, start,
                  {{"terminal variance deviation in SE units", dev_se, 3.0},
                   {"max residual autocorrelation lags 1..10",
                    rho.cwiseAbs().maxCoeff(), band}});
}

// Solver sweep: free case against the analytic Gaussian for both reference
// parameter sets, linear drift first moment, and the harmonic trap variance
// against the classical relaxation closed form.
CheckResult check_fpe_solver(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Sub> subs;

    const auto l1_free = [](const ProcessParams& p, double half_width) {
        const fpe::Grid1D grid(-half_width, half_width, 801, 0.01, 1.0, 512);
        const auto rho = fpe::evolve(p, grid, fpe::DriftSpec::make_free(), 0.0);
        double l1 = 0.0;
        for (int k = 0; k < grid.n_x; ++k) {
            l1 += std::abs(rho.values[k] -
                           fpe::analytic_density(p, 1.0, 0.0, grid.node(k)));
        }
        return l1 * grid.dx();
    };
    subs.push_back({"free L1 error, exponential member",
                    l1_free(ProcessParams(1.0, 1.0, 1.0), 6.5), 1e-3});
    subs.push_back({"free L1 error, fractional member",
                    l1_free(ProcessParams(0.8, 0.9, 0.7), 8.0), 1e-3});

    {
        const ProcessParams p(1.0, 1.0, 1.0);
        const fpe::Grid1D grid(-6.6, 8.2, 741, 0.01, 1.0, 512);
        const auto rho = fpe::evolve(p, grid, fpe::DriftSpec::make_linear(1.5), 0.0);
        double mass = 0.0, mean = 0.0;
        for (int k = 0; k < grid.n_x; ++k) {
            mass += rho.values[k];
            mean += rho.values[k] * grid.node(k);
        }
        mean /= mass;
        subs.push_back({"linear drift mean error",
                        std::abs(mean - 1.5 * (1.0 - 0.01)), grid.dx()});
    }

    {
        const ProcessParams p(1.0, 1.0, 0.0);
        const double omega = 2.0;
        const fpe::Grid1D grid(-14.0, 14.0, 601, 0.01, 3.0, 1024);
        const auto rho =
            fpe::evolve(p, grid, fpe::DriftSpec::make_harmonic(omega), 0.0);
        double mass = 0.0, m2 = 0.0;
        for (int k = 0; k < grid.n_x; ++k) {
            mass += rho.values[k];
            m2 += rho.values[k] * grid.node(k) * grid.node(k);
        }
        m2 /= mass;
        const double decay = std::exp(-2.0 * omega * (grid.t1 - grid.t0));
        const double target =
            decay * grid.t0 + (1.0 - decay) / (2.0 * omega);
        subs.push_back({"harmonic stationary variance rel err",
                        rel_diff(m2, target), 1e-2});
    }

    return finish(id, start, subs);
}

// Scaling laws: driftless variance exponent, small-lag increment-variance
// exponent, and the large-separation covariance decay exponent.
CheckResult check_scaling_laws(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Sub> subs;

    double worst_var_slope = 0.0;
    for (const auto& [alpha, gamma] :
         {std::pair{0.8, 0.9}, std::pair{0.7, 0.8}, std::pair{1.0, 0.9}}) {
        const ProcessParams p(alpha, gamma, 0.0);
        const double slope = std::log(kernel::variance_series(p, 2.0) /
                                      kernel::variance_series(p, 1.0)) /
                             std::log(2.0);
        worst_var_slope =
            std::max(worst_var_slope, std::abs(slope - (2.0 * p.ag() - 1.0)));
    }
    subs.push_back({"driftless variance exponent error", worst_var_slope, 1e-3});

    {
        const ProcessParams p(0.8, 0.9, 0.7);
        const double t = 1.0;
        const auto inc = [&](double tau) {
            return kernel::variance_series(p, t + tau) + kernel::variance_series(p, t) -
                   2.0 * kernel::covariance_series(p, t + tau, t);
        };
        const double slope = std::log(inc(1e-2) / inc(1e-3)) / std::log(10.0);
        subs.push_back({"increment variance exponent error",
                        std::abs(slope - (2.0 * p.ag() - 1.0)), 0.05});
    }

    {
        const ProcessParams p(0.8, 0.9, 1.0);
        SeriesControl green_ctl;
        green_ctl.rel_tol = 3e-3;
        const double t0 = 2.0;
        const double c1 = kernel::covariance_quadrature(p, t0 + 80.0, t0, 576, green_ctl);
        const double c2 = kernel::covariance_quadrature(p, t0 + 800.0, t0, 576, green_ctl);
        const double slope = std::log(c2 / c1) / std::log(10.0);
        subs.push_back({"covariance tail exponent error",
                        std::abs(slope - (-(p.alpha + 1.0))), 0.15});
    }

    return finish(id, start, subs);
}

// Classical path: discretized action value, optimality under 1000 pinned
// perturbations, quadratic decomposition, and the dual-kernel minimum.
CheckResult check_classical_action(const std::string& id) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Sub> subs;

    {
        const ProcessParams p(1.0, 1.0, 0.7);
        const pathint::BoundaryData b(0.0, 1.0, 1.0);
        const int n = 2048;
        const double dt = 1.0 / n;
        Vec samp(n + 1);
        for (int k = 0; k <= n; ++k) {
            samp[k] = pathint::classical_path(p, b, k * dt);
        }
        const langevin::GrunwaldOperator op(p, dt, n);
        const double s_disc = pathint::discrete_action(p, {samp, dt}, op);
        subs.push_back({"sampled classical action rel err",
                        rel_diff(s_disc, pathint::classical_action(p, b)), 1e-3});
    }

    int decreases = 0;
    double worst_cross = 0.0, worst_umin = 0.0;
    for (const ProcessParams& p :
         {ProcessParams(0.8, 0.9, 0.7), ProcessParams(1.0, 1.0, 1.0)}) {
        const pathint::BoundaryData b(0.2, 1.2, 1.0);
        const int n = 256;
        const double dt = 1.0 / n;
        const langevin::GrunwaldOperator op(p, dt, n);
        const auto xc = pathint::discrete_classical_path(op, b);
        const double s_min = pathint::discrete_action(p, xc, op);

        const auto vt = langevin::build_kernel_table(
            p, dt, n, langevin::KernelScheme::operator_inverse);
        const double ud = dt * vt.weights.squaredNorm();
        worst_umin = std::max(
            worst_umin, rel_diff(s_min, (b.x_beta - b.x0) * (b.x_beta - b.x0) /
                                            (2.0 * ud)));

        std::mt19937_64 gen(5);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int rep = 0; rep < 500; ++rep) {
            Vec q = Vec::Zero(n + 1);
            for (int k = 1; k < n; ++k) {
                q[k] = 1e-2 * nd(gen);
            }
            const double s_xq = pathint::discrete_action(p, {xc.values + q, dt}, op);
            const double s_q = pathint::discrete_action(p, {q, dt}, op);
            if (s_xq < s_min) {
                ++decreases;
            }
            worst_cross = std::max(
                worst_cross, std::abs(s_xq - s_min - s_q) / (1.0 + s_q));
        }
    }
    subs.push_back({"action decreases over 1000 perturbations", double(decreases), 0.0});
    subs.push_back({"cross-term cancellation", worst_cross, 1e-8});
    subs.push_back({"discrete minimum vs dual-kernel value", worst_umin, 1e-10});

    return finish(id, start, subs);
}

// Determinism round trip: re-executes the toolkit binary on a fixed
// simulate config with thread counts 1, 4, 8 plus a repeat run, and
// byte-compares every emitted artifact.
CheckResult check_determinism(const std::string& id, const std::string& cli_path) {
    const auto start = std::chrono::steady_clock::now();
    if (cli_path.empty() || !fs::exists(cli_path)) {
        CheckResult r;
        r.id = id;
        r.pass = false;
        r.measured = 1.0;
        r.bound = 0.0;
        r.detail = "toolkit binary not found at '" + cli_path + "'";
        r.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        return r;
    }

    const fs::path work =
        fs::temp_directory_path() / ("fou2_verify_det_" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path cfg = work / "config.json";
    io::write_text(cfg.string(),
                   "{\"schema_version\":1,"
                   "\"params\":{\"alpha\":0.8,\"gamma\":0.9,\"lambda\":0.7},"
                   "\"simulate\":{\"dt\":0.001953125,\"n_steps\":512,"
                   "\"n_paths\":2048,\"seed\":42}}");

    const int threads[] = {1, 4, 8, 4};
    int bad_runs = 0;
    int mismatches = 0;
    std::string ref_bin, ref_summary;
    for (int r = 0; r < 4; ++r) {
        const fs::path out = work / ("run" + std::to_string(r));
        fs::create_directories(out);
        const std::string cmd = "'" + cli_path + "' simulate --config '" +
                                cfg.string() + "' --out '" + out.string() +
                                "' --threads " + std::to_string(threads[r]) +
                                " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        if (rc == -1 || !WIFEXITED(rc) || WEXITSTATUS(rc) != 0) {
            ++bad_runs;
            continue;
        }
        const std::string bin = io::read_text((out / "ensemble.bin").string());
        const std::string summary = io::read_text((out / "summary.json").string());
        if (r == 0) {
            ref_bin = bin;
            ref_summary = summary;
        } else {
            mismatches += (bin != ref_bin) + (summary != ref_summary);
        }
    }
    fs::remove_all(work);

    return finish(id, start,
                  {{"failed subprocess runs", double(bad_runs), 0.0},
                   {"byte-mismatched artifacts", double(mismatches), 0.0}});
}

}  // namespace

std::vector<std::string> check_ids(Tier tier) {
    if (tier == Tier::quick) {
        return {"ou-reduction-covariance", "u-beta-variance-identity",
                "series-vs-quadrature",    "w-kernel-normalization",
                "propagator-moments",      "scaling-laws",
                "classical-action"};
    }
    return {"ou-reduction-covariance", "u-beta-variance-identity",
            "series-vs-quadrature",    "w-kernel-normalization",
            "propagator-moments",      "monte-carlo-closure",
            "fpe-solver",              "scaling-laws",
            "classical-action",        "determinism"};
}

CheckResult run_check(const std::string& id, const std::string& cli_path,
                      int n_threads) {
    if (id == "ou-reduction-covariance") return check_ou_reduction(id);
    if (id == "u-beta-variance-identity") return check_u_beta_identity(id);
    if (id == "series-vs-quadrature") return check_series_vs_quadrature(id);
    if (id == "w-kernel-normalization") return check_w_normalization(id);
    if (id == "propagator-moments") return check_propagator_moments(id);
    if (id == "monte-carlo-closure") return check_monte_carlo(id, n_threads);
    if (id == "fpe-solver") return check_fpe_solver(id);
    if (id == "scaling-laws") return check_scaling_laws(id);
    if (id == "classical-action") return check_classical_action(id);
    if (id == "determinism") return check_determinism(id, cli_path);
    throw std::invalid_argument("run_check: unknown check id '" + id + "'");
}

std::vector<CheckResult> run_tier(Tier tier, const std::string& cli_path,
                                  int n_threads) {
    std::vector<CheckResult> out;
    for (const std::string& id : check_ids(tier)) {
        out.push_back(run_check(id, cli_path, n_threads));
    }
    return out;
}

}  // namespace verify
}  // namespace fou2
