#ifndef FOU2_VERIFY_HPP
#define FOU2_VERIFY_HPP

#include <string>
#include <vector>

namespace fou2 {
namespace verify {

// Outcome of one self-check.  Each check aggregates one or more sub-checks;
// measured/bound report the sub-check that came closest to (or crossed) its
// threshold, always oriented so the check passes iff measured <= bound.
// detail lists every sub-check with its own figure and threshold.
struct CheckResult {
    std::string id;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
    double runtime_s = 0.0;
    std::string detail;
};

enum class Tier { quick, full };

// Check identifiers in execution order.  quick covers the deterministic
// analytic cross-checks; full adds the Monte Carlo closure, the solver
// sweep, and the binary determinism round trip.
std::vector<std::string> check_ids(Tier tier);

// Runs a single named check.  cli_path locates the toolkit binary and is
// consulted only by "determinism" (which re-executes it in a subprocess);
// n_threads feeds the Monte Carlo ensemble generation.  Unknown ids throw
// std::invalid_argument.
CheckResult run_check(const std::string& id, const std::string& cli_path,
                      int n_threads = 1);

// Runs every check of the tier, in order, collecting the results.
std::vector<CheckResult> run_tier(Tier tier, const std::string& cli_path,
                                  int n_threads = 1);

}  // namespace verify
}  // namespace fou2

#endif
