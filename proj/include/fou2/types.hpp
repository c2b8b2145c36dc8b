#ifndef FOU2_TYPES_HPP
#define FOU2_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace fou2 {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VectorX<double>;
using Mat = MatrixX<double>;

// Truncation policy shared by every series evaluator.
struct SeriesControl {
    double rel_tol = 1e-12;
    int max_terms = 10000;
};

// Outcome of a truncated series evaluation.  Invariant: converged implies
// tail_estimate <= rel_tol * max(|value|, value_guard) where value_guard
// protects the relative test when the value itself underflows.
struct SeriesResult {
    double value = 0.0;
    int terms_used = 0;
    bool converged = false;
    double tail_estimate = 0.0;
};

// Thrown when a series or quadrature evaluator cannot meet its tolerance.
// Callers must never use a non-converged value silently; evaluators throw
// instead of returning converged = false.
class SeriesError : public std::runtime_error {
  public:
    explicit SeriesError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fou2

#endif
