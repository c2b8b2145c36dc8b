#include "fou2/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "fou2/kernel.hpp"

namespace fou2 {
namespace langevin {

namespace {

constexpr int kJMaxCap = 64;
constexpr int kDirectConvMax = 4096;  // direct triangular sums up to this length
constexpr int kGemmMaxSteps = 4096;   // chunked matrix products up to this length
constexpr int kChunkPaths = 1024;
constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += kSeedStride;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Grunwald-Letnikov weights of order mu scaled by pref: row_0 = pref,
// row_k = row_{k-1} (k - 1 - mu) / k.  Scaling inside the recurrence keeps
// intermediates bounded when pref is tiny and the weights grow.
void gl_row(double mu, double pref, int n, double* row) {
    row[0] = pref;
    for (int k = 1; k <= n; ++k) {
        row[k] = row[k - 1] * ((k - 1 - mu) / k);
    }
}

// Relative L1-mass bound of binomial-expansion row j over a window of length
// T: |binom(gamma, j)| (lambda^alpha T^alpha)^j / Gamma(alpha (j - gamma) + 1).
// Used to pick the truncation of (D^alpha + lambda^alpha)^gamma.
double forward_row_bound(const ProcessParams& p, double big_t, int j) {
    double cb = 1.0;
    for (int i = 0; i < j; ++i) {
        cb *= (p.gamma - i) / (i + 1);
    }
    const double w = p.lambda_alpha() * std::pow(big_t, p.alpha);
    return std::abs(cb) * std::pow(w, j) / std::tgamma(p.alpha * (j - p.gamma) + 1.0);
}

// Companion bound for the inverse-operator expansion, row i relative to the
// leading fractional integral: |binom(-gamma, i)| (lambda^alpha T^alpha)^i
// Gamma(alpha gamma) / Gamma(alpha (gamma + i)).
double inverse_row_bound(const ProcessParams& p, double big_t, int i) {
    double cb = 1.0;
    for (int k = 0; k < i; ++k) {
        cb *= (-p.gamma - k) / (k + 1);
    }
    const double w = p.lambda_alpha() * std::pow(big_t, p.alpha);
    return std::abs(cb) * std::pow(w, i) * std::tgamma(p.ag()) /
           std::tgamma(p.alpha * (p.gamma + i));
}

void require_grid(double dt, int n_steps, const char* fn) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        std::ostringstream os;
        os << fn << ": requires dt > 0, got " << dt;
        throw std::invalid_argument(os.str());
    }
    if (n_steps < 1) {
        std::ostringstream os;
        os << fn << ": requires n_steps >= 1, got " << n_steps;
        throw std::invalid_argument(os.str());
    }
}

Vec fft_convolve_head(const Vec& a, const Vec& b, int n) {
    int nfft = 1;
    while (nfft < 2 * n) {
        nfft <<= 1;
    }
    std::vector<double> pa(nfft, 0.0), pb(nfft, 0.0);
    std::copy(a.data(), a.data() + std::min<int>(a.size(), n), pa.begin());
    std::copy(b.data(), b.data() + std::min<int>(b.size(), n), pb.begin());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> fa, fb;
    fft.fwd(fa, pa);
    fft.fwd(fb, pb);
    for (int k = 0; k < nfft; ++k) {
        fa[k] *= fb[k];
    }
    std::vector<double> conv;
    fft.inv(conv, fa);
    Vec out(n);
    std::copy(conv.begin(), conv.begin() + n, out.data());
    return out;
}

void fill_noise_row(std::uint64_t seed, int path_index, double* dst, int n) {
    std::uint64_t state =
        seed + (static_cast<std::uint64_t>(path_index) + 1) * kSeedStride;
    splitmix64(state);
    const std::uint64_t mix = splitmix64(state);
    std::mt19937_64 gen(mix);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        dst[k] = normal(gen);
    }
}

}  // namespace

KernelTable build_kernel_table(const ProcessParams& p, double dt, int n_steps,
                               KernelScheme scheme, const SeriesControl& ctl) {
    require_grid(dt, n_steps, "build_kernel_table");
    Vec w(n_steps);
    switch (scheme) {
        case KernelScheme::midpoint: {
            for (int k = 0; k < n_steps; ++k) {
                w[k] = kernel::green_g(p, (k + 0.5) * dt, ctl);
            }
            break;
        }
        case KernelScheme::cell_integrated:
        case KernelScheme::first_cell_rms: {
            double lo = 0.0;
            for (int k = 0; k < n_steps; ++k) {
                const double hi = kernel::green_g_integral(p, (k + 1) * dt, ctl);
                w[k] = (hi - lo) / dt;
                lo = hi;
            }
            if (scheme == KernelScheme::first_cell_rms) {
                w[0] = std::sqrt(kernel::variance_series(p, dt, ctl) / dt);
            }
            break;
        }
        case KernelScheme::operator_inverse: {
            // v_k = dt^(ag - 1) sum_i binom(-gamma, i) (lambda^alpha dt^alpha)^i
            //       g_k^(-alpha (gamma + i)); the binomial expansion of the
            //       inverse symbol, so the forward stencil annihilates it.
            const double big_t = n_steps * dt;
            int i_max = 0;
            if (p.lambda > 0.0) {
                while (i_max < kJMaxCap &&
                       inverse_row_bound(p, big_t, i_max + 1) >= ctl.rel_tol) {
                    ++i_max;
                }
                if (inverse_row_bound(p, big_t, i_max + 1) >= ctl.rel_tol) {
                    std::ostringstream os;
                    os << "build_kernel_table: inverse-operator expansion does not "
                          "reach rel_tol "
                       << ctl.rel_tol << " within " << kJMaxCap
                       << " rows (lambda^alpha T^alpha too large)";
                    throw SeriesError(os.str());
                }
            }
            w.setZero();
            std::vector<double> row(n_steps);
            const double u = p.lambda_alpha() * std::pow(dt, p.alpha);
            double cb = 1.0;
            for (int i = 0; i <= i_max; ++i) {
                const double pref = cb * std::pow(u, i);
                gl_row(-p.alpha * (p.gamma + i), pref, n_steps - 1, row.data());
                for (int k = 0; k < n_steps; ++k) {
                    w[k] += row[k];
                }
                cb *= (-p.gamma - i) / (i + 1);
            }
            w *= std::pow(dt, p.ag() - 1.0);
            break;
        }
    }
    if (!w.allFinite()) {
        throw SeriesError("build_kernel_table: non-finite kernel weight");
    }
    return {dt, std::move(w), scheme};
}

GrunwaldOperator::GrunwaldOperator(const ProcessParams& p, double dt_, int n_steps,
                                   int j_max_, const SeriesControl& ctl)
    : alpha(p.alpha), gamma(p.gamma), lambda(p.lambda), dt(dt_) {
    require_grid(dt_, n_steps, "GrunwaldOperator");
    const double big_t = n_steps * dt_;
    if (j_max_ >= 0) {
        j_max = j_max_;
        const double tail = forward_row_bound(p, big_t, j_max + 1);
        if (tail >= ctl.rel_tol) {
            std::ostringstream os;
            os << "GrunwaldOperator: j_max " << j_max << " leaves tail bound " << tail
               << " above rel_tol " << ctl.rel_tol;
            throw SeriesError(os.str());
        }
    } else if (p.lambda == 0.0) {
        j_max = 0;  // the operator collapses to the single derivative D^(ag)
    } else {
        j_max = 0;
        while (j_max < kJMaxCap &&
               forward_row_bound(p, big_t, j_max + 1) >= ctl.rel_tol) {
            ++j_max;
        }
        if (forward_row_bound(p, big_t, j_max + 1) >= ctl.rel_tol) {
            std::ostringstream os;
            os << "GrunwaldOperator: binomial expansion does not reach rel_tol "
               << ctl.rel_tol << " within " << kJMaxCap << " rows";
            throw SeriesError(os.str());
        }
    }

    coeffs.resize(j_max + 1, n_steps + 1);
    const double u = p.lambda_alpha() * std::pow(dt_, p.alpha);
    double cb = 1.0;
    std::vector<double> row(n_steps + 1);
    for (int j = 0; j <= j_max; ++j) {
        gl_row(p.alpha * (p.gamma - j), cb * std::pow(u, j), n_steps, row.data());
        for (int k = 0; k <= n_steps; ++k) {
            coeffs(j, k) = row[k];
        }
        cb *= (p.gamma - j) / (j + 1);
    }
    stencil = coeffs.colwise().sum().transpose() / std::pow(dt_, p.ag());
    if (!stencil.allFinite()) {
        throw SeriesError("GrunwaldOperator: non-finite stencil weight");
    }
}

Vec grunwald_apply(const GrunwaldOperator& op, const Vec& series) {
    const int n = static_cast<int>(series.size());
    if (n < 1 || n > op.stencil.size()) {
        throw std::invalid_argument(
            "grunwald_apply: series length must be in [1, stencil length]");
    }
    if (series[0] != 0.0) {
        throw std::invalid_argument(
            "grunwald_apply: requires series[0] == 0 (zero initial value)");
    }
    if (n <= kDirectConvMax) {
        Vec out(n);
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int m = 0; m <= k; ++m) {
                acc += op.stencil[m] * series[k - m];
            }
            out[k] = acc;
        }
        return out;
    }
    return fft_convolve_head(op.stencil, series, n);
}

PathEnsemble simulate(const ProcessParams& p, double dt, int n_steps, int n_paths,
                      std::uint64_t seed, KernelScheme scheme, int n_threads,
                      std::uint64_t max_cells, const SeriesControl& ctl) {
    require_grid(dt, n_steps, "simulate");
    if (n_paths < 1) {
        throw std::invalid_argument("simulate: requires n_paths >= 1");
    }
    if (n_threads < 1) {
        throw std::invalid_argument("simulate: requires n_threads >= 1");
    }
    const std::uint64_t cells =
        static_cast<std::uint64_t>(n_paths) * (static_cast<std::uint64_t>(n_steps) + 1);
    if (cells > max_cells) {
        std::ostringstream os;
        os << "simulate: n_paths * (n_steps + 1) = " << cells << " exceeds the cap "
           << max_cells;
        throw std::invalid_argument(os.str());
    }

    const KernelTable table = build_kernel_table(p, dt, n_steps, scheme, ctl);
    PathEnsemble ens{Mat(n_paths, n_steps + 1), dt, seed, p, scheme};
    ens.paths.col(0).setZero();

    const double root_dt = std::sqrt(dt);
    const int n = n_steps;

    if (n <= kGemmMaxSteps) {
        // x_{m+1} = sum_{j<=m} xi_j a(j, m) with a(j, m) = w_{m-j} sqrt(dt):
        // one upper-triangular product per chunk of paths.
        Mat a = Mat::Zero(n, n);
        for (int m = 0; m < n; ++m) {
            for (int j = 0; j <= m; ++j) {
                a(j, m) = table.weights[m - j] * root_dt;
            }
        }
        using RowMat =
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const int n_chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
        const auto worker = [&](int tid) {
            RowMat xi;  // row-major so each path's noise is contiguous
            for (int c = tid; c < n_chunks; c += n_threads) {
                const int r0 = c * kChunkPaths;
                const int rows = std::min(kChunkPaths, n_paths - r0);
                xi.resize(rows, n);
                for (int i = 0; i < rows; ++i) {
                    fill_noise_row(seed, r0 + i, xi.row(i).data(), n);
                }
                ens.paths.block(r0, 1, rows, n).noalias() =
                    xi * a.triangularView<Eigen::Upper>();
            }
        };
        if (n_threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(n_threads);
            for (int t = 0; t < n_threads; ++t) {
                pool.emplace_back(worker, t);
            }
            for (auto& th : pool) {
                th.join();
            }
        }
    } else {
        // Long-grid route: per-path FFT convolution of the kernel with the
        // noise; identical content for any thread count since each path is
        // generated and transformed independently.
        const auto worker = [&](int tid) {
            Vec xi(n);
            for (int i = tid; i < n_paths; i += n_threads) {
                fill_noise_row(seed, i, xi.data(), n);
                const Vec conv = fft_convolve_head(table.weights, xi, n);
                for (int k = 1; k <= n; ++k) {
                    ens.paths(i, k) = conv[k - 1] * root_dt;
                }
            }
        };
        if (n_threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(n_threads);
            for (int t = 0; t < n_threads; ++t) {
                pool.emplace_back(worker, t);
            }
            for (auto& th : pool) {
                th.join();
            }
        }
    }

    return ens;
}

MomentEstimate sample_covariance(const PathEnsemble& ens, int i, int j) {
    const int n = static_cast<int>(ens.paths.rows());
    const int cols = static_cast<int>(ens.paths.cols());
    if (n < 2) {
        throw std::invalid_argument("sample_covariance: requires n_paths >= 2");
    }
    if (i < 0 || j < 0 || i >= cols || j >= cols) {
        throw std::invalid_argument("sample_covariance: grid index out of range");
    }
    const Vec prod = ens.paths.col(i).cwiseProduct(ens.paths.col(j));
    const double mean = prod.mean();
    const double ss = (prod.array() - mean).square().sum();
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(static_cast<double>(n));
    return {mean, se, n};
}

Vec residual_autocorrelation(const GrunwaldOperator& op, const PathEnsemble& ens,
                             int max_lag) {
    const int cols = static_cast<int>(ens.paths.cols());
    if (max_lag < 1 || max_lag >= cols - 1) {
        throw std::invalid_argument(
            "residual_autocorrelation: requires 1 <= max_lag < n_steps");
    }
    Vec num = Vec::Zero(max_lag);
    double den = 0.0;
    for (int i = 0; i < ens.paths.rows(); ++i) {
        const Vec path = ens.paths.row(i).transpose();
        const Vec r = grunwald_apply(op, path);
        // r[0] corresponds to the pinned zero sample and vanishes.
        den += r.tail(cols - 1).squaredNorm();
        for (int l = 1; l <= max_lag; ++l) {
            for (int k = 1; k + l < cols; ++k) {
                num[l - 1] += r[k] * r[k + l];
            }
        }
    }
    if (!(den > 0.0)) {
        throw std::invalid_argument("residual_autocorrelation: zero residual energy");
    }
    return num / den;
}

Vec fractional_integral(double alpha, const Vec& series, double dt) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::domain_error("fractional_integral: requires alpha in (0, 1]");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("fractional_integral: requires dt > 0");
    }
    const int n = static_cast<int>(series.size());
    Vec out = Vec::Zero(n);
    if (n < 2) {
        return out;
    }
    Vec b(n - 1);
    for (int m = 0; m < n - 1; ++m) {
        b[m] = std::pow(m + 1.0, alpha) - std::pow(static_cast<double>(m), alpha);
    }
    const double scale = std::pow(dt, alpha) / std::tgamma(alpha + 1.0);
    for (int k = 1; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            acc += series[j] * b[k - 1 - j];
        }
        out[k] = scale * acc;
    }
    return out;
}

}  // namespace langevin
}  // namespace fou2
