#pragma once

#include "portopt/solver.hpp"
#include "portopt/types.hpp"

namespace portopt {

/// Portfolio problem with Wishart covariance noise of level alpha.
struct WishartAllocProblem {
  PortfolioProblem problem;
  double alpha;

  void validate() const;
};

struct WishartDiagnostics {
  double d = 0.0;  // realized quadratic risk w'Sigma w
  double q = 0.0;  // signal-to-noise mu0' Sigma^-1 mu0
  double g = 1.0;  // allocation scaling, in (0, 1]
  bool multiple_roots = false;
};

struct AllocationResult {
  Vec weights;
  WishartDiagnostics diagnostics;
  SolveReport report;
};

/// Marginalized objective
///   mu0'w - a/2 w'Sigma0 w + alpha/(2a) ln(1 - (a^2/alpha) w'Sigma w),
/// concave on its open domain.
double marginalized_objective(const WishartAllocProblem& p, const Vec& w);
Vec marginalized_gradient(const WishartAllocProblem& p, const Vec& w);

/// Scaling factor g_W = (sqrt(alpha(alpha + 4q)) - alpha) / (2q),
/// evaluated in the conjugate form 2 alpha / (sqrt(alpha(alpha+4q)) + alpha)
/// which is exact down to q = 0. Risk aversion cancels algebraically.
double scaling_g_wishart(double q, double alpha);

/// Laplace-return counterpart g_LD = (sqrt(1 + 2q) - 1) / q.
double scaling_g_laplace(double q);

/// Closed form for Sigma0 = 0: w* = g_W(q, alpha) Sigma^-1 mu0 / a.
AllocationResult solve_weights_no_mu_uncertainty(const WishartAllocProblem& p);

/// General diagonal Sigma0 >= 0: solves the scalar fixed point
/// d = w(d)' Sigma w(d) with
/// w(d) = (g_d / a) (Sigma + g_d Sigma0)^-1 mu0, g_d = 1 - a^2 d / alpha,
/// by bracketing scan plus bisection. Reports a diagnostic when the scan
/// detects more than one sign change.
AllocationResult solve_weights_full(const WishartAllocProblem& p);

/// Convex-engine maximization of the marginalized objective under
/// constraints; reduces to solve_weights_full when unconstrained.
AllocationResult solve_weights_constrained(const WishartAllocProblem& p,
                                           const ConstraintSet& cs,
                                           const SolverOptions& opts = {});

}  // namespace portopt
