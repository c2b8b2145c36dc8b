#include "fou2/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

namespace fou2 {
namespace quadrature {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981674833411452;

QuadRule golub_welsch(const Vec& offdiag, double weight_scale) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Mat jacobi = Mat::Zero(n, n);
    for (int k = 0; k < n - 1; ++k) {
        jacobi(k, k + 1) = offdiag(k);
        jacobi(k + 1, k) = offdiag(k);
    }
    Eigen::SelfAdjointEigenSolver<Mat> solver(jacobi);
    QuadRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights = weight_scale *
                   solver.eigenvectors().row(0).array().square().matrix().transpose();
    return rule;
}

const QuadRule& cached(std::map<int, QuadRule>& cache, std::mutex& mtx, int n,
                       const std::function<QuadRule(int)>& make) {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, make(n)).first;
    }
    return it->second;
}

const QuadRule& legendre_cached(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return cached(cache, mtx, n, [](int m) {
        Vec off(m - 1);
        for (int k = 1; k < m; ++k) {
            off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
        }
        return golub_welsch(off, 2.0);
    });
}

}  // namespace

QuadRule gauss_legendre(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: requires n >= 1");
    }
    return legendre_cached(n);
}

QuadRule gauss_hermite(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_hermite: requires n >= 1");
    }
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return cached(cache, mtx, n, [](int m) {
        Vec off(m - 1);
        for (int k = 1; k < m; ++k) {
            off(k - 1) = std::sqrt(0.5 * k);
        }
        return golub_welsch(off, kSqrtPi);
    });
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, int n) {
    const QuadRule& rule = legendre_cached(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += rule.weights(i) * f(mid + half * rule.nodes(i));
    }
    return acc * half;
}

double graded_integrate(const std::function<double(double)>& f, double upper,
                        int n_panels, int nodes_per_panel, double ratio) {
    if (upper == 0.0) {
        return 0.0;
    }
    if (!(upper > 0.0)) {
        throw std::invalid_argument("graded_integrate: requires upper >= 0");
    }
    if (n_panels < 1 || nodes_per_panel < 2 || !(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("graded_integrate: invalid panel layout");
    }
    double acc = 0.0;
    double hi = upper;
    for (int j = 0; j < n_panels; ++j) {
        double lo = upper * std::pow(ratio, j + 1);
        acc += gauss_panel(f, lo, hi, nodes_per_panel);
        hi = lo;
    }
    acc += gauss_panel(f, 0.0, hi, nodes_per_panel);
    return acc;
}

}  // namespace quadrature
}  // namespace fou2
