#include "portopt/scenario.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace portopt {

void TwoStateScenario::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  if (!(a > 0.0)) throw DomainError("risk aversion must be positive");
  const int n = sigma_n.dim();
  if (sigma_s.dim() != n || mu_n.size() != n || mu_s.size() != n) {
    throw SchemaError("two-state scenario dimensions disagree");
  }
}

void StressedCovSpec::validate() const {
  if (dim < 1) throw SchemaError("stressed covariance dimension must be >= 1");
  if (!(sigma_s > 0.0)) throw DomainError("stressed volatility must be positive");
  const double lo = dim > 1 ? -1.0 / (dim - 1) : -1.0;
  if (!(rho_s > lo && rho_s < 1.0)) {
    throw NotPositiveDefiniteError("rho_s outside the PD range (-1/(N-1), 1)");
  }
}

CovMatrix build_stressed_cov(const StressedCovSpec& spec) {
  spec.validate();
  const double v = spec.sigma_s * spec.sigma_s;
  Mat m = Mat::Constant(spec.dim, spec.dim, v * spec.rho_s);
  m.diagonal().setConstant(v);
  CovMatrix out(std::move(m));
  if (out.condition_number() > 1e10) {
    std::cerr << "portopt: stressed covariance is near-singular (condition "
              << out.condition_number() << ")\n";
  }
  return out;
}

std::pair<double, double> state_exponents(const TwoStateScenario& sc, const Vec& w) {
  sc.validate();
  if (w.size() != sc.dim()) throw SchemaError("weight dimension mismatch");
  const double a = sc.a;
  const double inf = std::numeric_limits<double>::infinity();
  const double un =
      sc.p == 0.0 ? -inf
                  : std::log(sc.p) + 0.5 * a * a * w.dot(sc.sigma_n.matrix() * w) -
                        a * sc.mu_n.dot(w);
  const double us =
      sc.p == 1.0 ? -inf
                  : std::log1p(-sc.p) + 0.5 * a * a * w.dot(sc.sigma_s.matrix() * w) -
                        a * sc.mu_s.dot(w);
  return {un, us};
}

double lse_objective(const TwoStateScenario& sc, const Vec& w) {
  const auto [un, us] = state_exponents(sc, w);
  if (sc.p == 1.0) return un;
  if (sc.p == 0.0) return us;
  const double m = std::max(un, us);
  return m + std::log(std::exp(un - m) + std::exp(us - m));
}

Vec lse_gradient(const TwoStateScenario& sc, const Vec& w) {
  const auto [un, us] = state_exponents(sc, w);
  const double a = sc.a;
  const Vec gn = a * a * (sc.sigma_n.matrix() * w) - a * sc.mu_n;
  const Vec gs = a * a * (sc.sigma_s.matrix() * w) - a * sc.mu_s;
  if (sc.p == 1.0) return gn;
  if (sc.p == 0.0) return gs;
  const double m = std::max(un, us);
  const double en = std::exp(un - m), es = std::exp(us - m);
  return (en * gn + es * gs) / (en + es);
}

std::pair<Vec, SolveReport> solve_two_state(const TwoStateScenario& sc,
                                            const ConstraintSet& cs,
                                            const SolverOptions& opts) {
  sc.validate();
  Objective f;
  f.value = [&sc](const Vec& w) { return lse_objective(sc, w); };
  f.grad = [&sc](const Vec& w) { return lse_gradient(sc, w); };
  const Vec x0 = low_a_limit_weights(sc);
  auto [w, rep] = minimize(f, x0, cs, opts);
  if (rep.status != SolveStatus::Converged) {
    throw ConvergenceError("two-state solve did not converge");
  }
  return {w, rep};
}

Vec low_a_limit_weights(const TwoStateScenario& sc) {
  sc.validate();
  const Vec mu = sc.p * sc.mu_n + (1.0 - sc.p) * sc.mu_s;
  const Vec dm = sc.mu_n - sc.mu_s;
  Mat sig = sc.p * sc.sigma_n.matrix() + (1.0 - sc.p) * sc.sigma_s.matrix() +
            sc.p * (1.0 - sc.p) * dm * dm.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(sig, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) {
    throw SingularMatrixError("mixture covariance is singular");
  }
  return Vec(sig.ldlt().solve(mu)) / sc.a;
}

std::pair<Vec, SolveReport> min_variance_two_state(const TwoStateScenario& sc,
                                                   double ridge,
                                                   const SolverOptions& opts) {
  sc.validate();
  if (ridge < 0.0) throw DomainError("ridge must be nonnegative");
  const int n = sc.dim();
  Mat m = sc.p * sc.sigma_n.matrix() + (1.0 - sc.p) * sc.sigma_s.matrix();
  m.diagonal().array() += ridge;
  Objective f;
  f.value = [&m](const Vec& w) { return w.dot(m * w); };
  f.grad = [&m](const Vec& w) { return Vec(2.0 * (m * w)); };
  const Vec x0 = Vec::Constant(n, 1.0 / n);
  auto [w, rep] = minimize(f, x0, ConstraintSet::simplex(), opts);
  return {w, rep};
}

std::pair<Vec, SolveReport> minimax_portfolio(const CovMatrix& sigma, double b,
                                              const SolverOptions& opts) {
  if (b < 0.0) throw DomainError("risk weight b must be nonnegative");
  const int n = sigma.dim();
  const Mat& s = sigma.matrix();
  Vec w = Vec::Constant(n, 1.0 / n);
  SolveReport rep;
  // Temperature schedule on the smoothed max; each stage warm-starts the
  // next. The final gap tau*log(N) is far below the solver tolerance used
  // by callers.
  for (double tau = 1e-2; tau >= 1e-7; tau *= 0.1) {
    Objective f;
    f.value = [&, tau](const Vec& x) {
      const double m = x.maxCoeff();
      const double lse =
          m + tau * std::log((((x.array() - m) / tau).exp()).sum());
      return lse + 0.5 * b * x.dot(s * x);
    };
    f.grad = [&, tau](const Vec& x) {
      const double m = x.maxCoeff();
      Eigen::ArrayXd e = ((x.array() - m) / tau).exp();
      e /= e.sum();
      return Vec(e.matrix() + b * (s * x));
    };
    auto [wn, r] = minimize(f, w, ConstraintSet::simplex(), opts);
    w = wn;
    rep = r;
  }
  if (rep.status != SolveStatus::Converged) {
    throw ConvergenceError("minimax solve did not converge");
  }
  rep.objective = w.maxCoeff() + 0.5 * b * w.dot(s * w);
  return {w, rep};
}

}  // namespace portopt
