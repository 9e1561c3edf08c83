#pragma once

#include "portopt/solver.hpp"
#include "portopt/types.hpp"

namespace portopt {

/// Two-regime mixture: normal with probability p, stressed with 1 - p.
struct TwoStateScenario {
  double p;
  Vec mu_n;
  CovMatrix sigma_n;
  Vec mu_s;
  CovMatrix sigma_s;
  double a;

  void validate() const;
  int dim() const { return sigma_n.dim(); }
};

/// Equicorrelation/equivariance stressed covariance:
/// sigma_s^2 ((1 - rho_s) I + rho_s 11').
struct StressedCovSpec {
  double sigma_s;
  double rho_s;
  int dim;

  void validate() const;
};

/// Builds the stressed covariance; eigenvalues are sigma_s^2 (1 + (N-1)
/// rho_s) once and sigma_s^2 (1 - rho_s) with multiplicity N-1. Emits a
/// stderr warning when the result is near-singular.
CovMatrix build_stressed_cov(const StressedCovSpec& spec);

/// State exponents u_n = log p + a^2/2 w'Sigma_n w - a mu_n'w (and u_s
/// alike); p = 0 or 1 drops the -inf branch exactly.
std::pair<double, double> state_exponents(const TwoStateScenario& sc, const Vec& w);

/// log(exp(u_n) + exp(u_s)) with the max-shift trick; convex in w.
double lse_objective(const TwoStateScenario& sc, const Vec& w);
Vec lse_gradient(const TwoStateScenario& sc, const Vec& w);

std::pair<Vec, SolveReport> solve_two_state(const TwoStateScenario& sc,
                                            const ConstraintSet& cs = {},
                                            const SolverOptions& opts = {});

/// a -> 0 Taylor limit: (1/a) SigmaTilde^-1 muTilde with
/// muTilde = p mu_n + (1-p) mu_s and
/// SigmaTilde = p Sigma_n + (1-p) Sigma_s
///            + p(1-p)(mu_n - mu_s)(mu_n - mu_s)'.
Vec low_a_limit_weights(const TwoStateScenario& sc);

/// Simplex-constrained minimum variance under the mixture covariance with
/// an L2 ridge: min w'(p Sigma_n + (1-p) Sigma_s) w + c w'w.
std::pair<Vec, SolveReport> min_variance_two_state(const TwoStateScenario& sc,
                                                   double ridge = 0.0,
                                                   const SolverOptions& opts = {});

/// Worst-case portfolio min |w|_inf + b/2 w'Sigma w on the long-only
/// simplex. The max norm is smoothed by a temperature-scheduled
/// LogSumExp whose final gap is far below the reported tolerances; at
/// b = 0 symmetry makes the uniform solution exact.
std::pair<Vec, SolveReport> minimax_portfolio(const CovMatrix& sigma, double b,
                                              const SolverOptions& opts = {});

}  // namespace portopt
