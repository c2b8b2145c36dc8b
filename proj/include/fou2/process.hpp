#ifndef FOU2_PROCESS_HPP
#define FOU2_PROCESS_HPP

#include <vector>

#include "fou2/types.hpp"

namespace fou2 {

// Parameters of the two-index fractional relaxation process.
// Validity window: alpha in (0, 1], gamma in (0, 1], lambda >= 0 and
// alpha * gamma > 1/2 so that pointwise variances exist.
struct ProcessParams {
    double alpha;
    double gamma;
    double lambda;

    ProcessParams(double alpha_, double gamma_, double lambda_);

    double ag() const { return alpha * gamma; }
    double hurst() const { return alpha * gamma - 0.5; }
    double lambda_alpha() const;
};

// Coefficient cache for the relaxation-series evaluators.  The quadratic
// coefficient family is generated twice, by the variance-series grouping and
// by the diffusion-series grouping, with identical summation order; the
// constructor asserts the two families agree bitwise.
class CoeffTable {
  public:
    CoeffTable(const ProcessParams& p, int q_max);

    int q_max() const { return q_max_; }

    // Generalized binomial weights b_m in long double.
    const std::vector<long double>& binom() const { return b_; }
    // 1/Gamma(alpha (gamma + m)).
    const std::vector<long double>& inv_gamma_low() const { return ig0_; }
    // 1/Gamma(1 + alpha (gamma + m)).
    const std::vector<long double>& inv_gamma_high() const { return ig1_; }

    long double lambda_q_l(int q) const { return lambda_[static_cast<size_t>(q)]; }
    double lambda_q(int q) const { return static_cast<double>(lambda_[static_cast<size_t>(q)]); }
    double omega_q(int q) const { return static_cast<double>(omega_[static_cast<size_t>(q)]); }

  private:
    int q_max_;
    std::vector<long double> b_;
    std::vector<long double> ig0_;
    std::vector<long double> ig1_;
    std::vector<long double> lambda_;
    std::vector<long double> omega_;
};

}  // namespace fou2

#endif
