#pragma once

#include "portopt/types.hpp"

namespace portopt {

/// One risky asset with shifted-gamma variance noise and Gaussian
/// expected-return noise.
struct UnivariateProblem {
  double mu0;
  double sigma0_sq;    // uncertainty of mu0
  double sigma_sq;     // stochastic variance scale
  double sigma_min_sq; // deterministic variance floor
  double alpha;        // variance noise level
  double a;            // risk aversion

  void validate() const;
  /// Admissible weights satisfy |w| < sqrt(alpha) / (a sigma).
  double weight_bound() const;
};

/// Log-magnitude L(w) of the marginalized expected utility -exp(L(w)):
///   L = a^2/2 (sigma_min^2 + sigma0^2) w^2 - a mu0 w
///       - alpha/2 ln(1 - (a^2/alpha) w^2 sigma^2).
/// Maximizing the utility is minimizing L. Throws DomainError at or
/// beyond the admissible weight bound.
double marginal_expected_utility_log(const UnivariateProblem& p, double w);

/// Exact optimal weight: the admissible real root of the optimality cubic
///   a^3 (s_min + s_0) s^2 w^3 - a^2 mu0 s^2 w^2
///   - a alpha (s^2 + s_min + s_0) w + mu0 alpha = 0
/// selected by direct objective comparison. Falls back to the quadratic
/// branch when the cubic coefficient degenerates.
double solve_cubic(const UnivariateProblem& p);

enum class AsymptoticRegime {
  MuSmall,      // mu0 -> 0
  MuLarge,      // mu0 -> infinity
  AlphaLarge,   // small variance uncertainty
  AlphaSmall,   // large variance uncertainty (inverse volatility leading term)
  Sigma0Large,  // large expected-return uncertainty
  Sigma0Small,  // small expected-return uncertainty, sigma_min = 0
};

/// Leading-plus-first-correction expansions of the optimal weight.
/// Parameter-ordering preconditions are documented, not enforced.
double asymptotic_weight(const UnivariateProblem& p, AsymptoticRegime regime);

}  // namespace portopt
