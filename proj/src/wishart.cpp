#include "portopt/wishart.hpp"

#include <cmath>

namespace portopt {

void WishartAllocProblem::validate() const {
  if (!(alpha > 0.0)) throw DomainError("Wishart allocation requires alpha > 0");
  problem.sigma().require_positive_diagonal();
}

double marginalized_objective(const WishartAllocProblem& p, const Vec& w) {
  p.validate();
  const double a = p.problem.risk_aversion();
  const Mat& sigma = p.problem.sigma().matrix();
  const double quad = w.dot(sigma * w);
  const double x = (a * a / p.alpha) * quad;
  if (x >= 1.0) {
    throw DomainError("marginalized objective undefined: (a^2/alpha) w'Sigma w >= 1");
  }
  const double quad0 = (p.problem.sigma0_diag().array() * w.array().square()).sum();
  // log1p keeps full relative precision when x is tiny (large alpha).
  return p.problem.mu0().dot(w) - 0.5 * a * quad0 +
         p.alpha / (2.0 * a) * std::log1p(-x);
}

Vec marginalized_gradient(const WishartAllocProblem& p, const Vec& w) {
  const double a = p.problem.risk_aversion();
  const Mat& sigma = p.problem.sigma().matrix();
  const Vec sw = sigma * w;
  const double arg = 1.0 - (a * a / p.alpha) * w.dot(sw);
  if (arg <= 0.0) {
    throw DomainError("marginalized gradient undefined outside the open domain");
  }
  return p.problem.mu0() -
         a * (p.problem.sigma0_diag().array() * w.array()).matrix() -
         (a / arg) * sw;
}

double scaling_g_wishart(double q, double alpha) {
  if (q < 0.0 || !(alpha > 0.0)) {
    throw DomainError("scaling_g_wishart requires q >= 0, alpha > 0");
  }
  return 2.0 * alpha / (std::sqrt(alpha * (alpha + 4.0 * q)) + alpha);
}

double scaling_g_laplace(double q) {
  if (q < 0.0) throw DomainError("scaling_g_laplace requires q >= 0");
  return 2.0 / (std::sqrt(1.0 + 2.0 * q) + 1.0);
}

AllocationResult solve_weights_no_mu_uncertainty(const WishartAllocProblem& p) {
  p.validate();
  if (p.problem.sigma0_diag().maxCoeff() != 0.0) {
    throw DomainError("solve_weights_no_mu_uncertainty requires Sigma0 = 0");
  }
  p.problem.sigma().require_invertible();
  const double a = p.problem.risk_aversion();
  const Mat& sigma = p.problem.sigma().matrix();
  const Vec mv = sigma.ldlt().solve(p.problem.mu0());
  const double q = p.problem.mu0().dot(mv);

  AllocationResult res;
  res.diagnostics.q = q;
  res.diagnostics.g = scaling_g_wishart(q, p.alpha);
  res.diagnostics.d = p.alpha * (1.0 - res.diagnostics.g) / (a * a);
  res.weights = (res.diagnostics.g / a) * mv;
  res.report.status = SolveStatus::Converged;
  res.report.objective = marginalized_objective(p, res.weights);
  res.report.grad_norm = marginalized_gradient(p, res.weights).norm() /
                         std::max(1.0, std::abs(res.report.objective));
  return res;
}

namespace {

Vec weights_at_d(const WishartAllocProblem& p, double d) {
  const double a = p.problem.risk_aversion();
  const double g = 1.0 - a * a * d / p.alpha;
  Mat m = p.problem.sigma().matrix();
  m.diagonal() += g * p.problem.sigma0_diag();
  return (g / a) * Vec(m.ldlt().solve(p.problem.mu0()));
}

}  // namespace

AllocationResult solve_weights_full(const WishartAllocProblem& p) {
  p.validate();
  p.problem.sigma().require_invertible();
  const double a = p.problem.risk_aversion();
  const Mat& sigma = p.problem.sigma().matrix();
  const double d_max = p.alpha / (a * a);

  auto residual = [&](double d) {
    const Vec w = weights_at_d(p, d);
    return w.dot(sigma * w) - d;
  };

  AllocationResult res;
  res.diagnostics.q = p.problem.mu0().dot(sigma.ldlt().solve(p.problem.mu0()));

  // Bracketing scan over [0, d_max). residual(0) >= 0 and the residual is
  // negative near d_max, so at least one sign change exists.
  const int scan = 64;
  const double hi = d_max * (1.0 - 1e-9);
  double lo_d = 0.0, lo_r = residual(0.0);
  int sign_changes = 0;
  double bracket_lo = 0.0, bracket_hi = hi;
  bool bracketed = false;
  if (lo_r <= 0.0) {
    bracketed = true;  // root at d = 0 (mu0 = 0 or degenerate)
    bracket_hi = 0.0;
  }
  for (int i = 1; i <= scan && !(bracketed && sign_changes > 1); ++i) {
    const double d = hi * i / scan;
    const double r = residual(d);
    if (lo_r > 0.0 && r <= 0.0) {
      ++sign_changes;
      if (!bracketed) {
        bracket_lo = lo_d;
        bracket_hi = d;
        bracketed = true;
      }
    } else if (lo_r <= 0.0 && r > 0.0) {
      ++sign_changes;
    }
    lo_d = d;
    lo_r = r;
  }
  if (!bracketed) {
    throw ConvergenceError("no sign change found for the d fixed point");
  }
  res.diagnostics.multiple_roots = sign_changes > 1;

  double d_lo = bracket_lo, d_hi = bracket_hi;
  for (int i = 0; i < 200 && d_hi - d_lo > 0.0; ++i) {
    const double mid = 0.5 * (d_lo + d_hi);
    (residual(mid) > 0.0 ? d_lo : d_hi) = mid;
  }
  const double d = 0.5 * (d_lo + d_hi);
  res.diagnostics.d = d;
  res.diagnostics.g = 1.0 - a * a * d / p.alpha;
  res.weights = weights_at_d(p, d);
  res.report.status = SolveStatus::Converged;
  res.report.objective = marginalized_objective(p, res.weights);
  res.report.grad_norm = marginalized_gradient(p, res.weights).norm() /
                         std::max(1.0, std::abs(res.report.objective));
  return res;
}

AllocationResult solve_weights_constrained(const WishartAllocProblem& p,
                                           const ConstraintSet& cs,
                                           const SolverOptions& opts) {
  if (cs.empty()) {
    return solve_weights_full(p);
  }
  p.validate();
  p.problem.sigma().require_invertible();
  const double a = p.problem.risk_aversion();
  Objective f;
  f.value = [&p](const Vec& w) { return -marginalized_objective(p, w); };
  f.grad = [&p](const Vec& w) { return Vec(-marginalized_gradient(p, w)); };
  f.in_domain = [&p, a](const Vec& w) {
    return (a * a / p.alpha) * w.dot(p.problem.sigma().matrix() * w) < 1.0;
  };
  // Scaled MV start, strictly inside the log domain.
  Vec x0 = 0.5 / a * Vec(p.problem.sigma().matrix().ldlt().solve(p.problem.mu0()));
  while (!f.in_domain(x0)) x0 *= 0.5;

  auto [w, rep] = minimize(f, x0, cs, opts);
  AllocationResult res;
  res.weights = w;
  res.report = rep;
  res.report.objective = -rep.objective;
  res.diagnostics.d = w.dot(p.problem.sigma().matrix() * w);
  res.diagnostics.g = 1.0 - a * a * res.diagnostics.d / p.alpha;
  res.diagnostics.q =
      p.problem.mu0().dot(p.problem.sigma().matrix().ldlt().solve(p.problem.mu0()));
  if (rep.status != SolveStatus::Converged) {
    throw ConvergenceError("constrained Wishart solve did not converge");
  }
  return res;
}

}  // namespace portopt
