#ifndef FOU2_QUADRATURE_HPP
#define FOU2_QUADRATURE_HPP

#include <functional>

#include "fou2/types.hpp"

namespace fou2 {
namespace quadrature {

struct QuadRule {
    Vec nodes;
    Vec weights;
};

// Gauss-Legendre rule on [-1, 1], nodes ascending (Golub-Welsch).
QuadRule gauss_legendre(int n);

// Gauss-Hermite rule with weight exp(-y^2) on the real line (physicists').
QuadRule gauss_hermite(int n);

// Integral of f over [a, b] with a single n-node Gauss-Legendre rule.
double gauss_panel(const std::function<double(double)>& f, double a, double b, int n);

// Integral of f over [0, upper] on geometric panels graded toward 0:
// panels [upper r^(j+1), upper r^j] for j = 0..n_panels-1 plus the closing
// panel [0, upper r^n_panels], each integrated with a fixed Gauss-Legendre
// rule.  Suited to integrands with an endpoint singularity in a derivative.
double graded_integrate(const std::function<double(double)>& f, double upper,
                        int n_panels = 48, int nodes_per_panel = 12,
                        double ratio = 0.5);

}  // namespace quadrature
}  // namespace fou2

#endif
