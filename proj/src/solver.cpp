#include "portopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

namespace portopt {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-20;
// Rounding slack for the sufficient-decrease test: near a minimizer the true
// decrease can fall below the floating-point resolution of the objective, and
// an exact Armijo test then rejects every step and stalls the iteration.
constexpr double kNoise = 1e-14;

bool in_domain(const Objective& f, const Vec& x) {
  return !f.in_domain || f.in_domain(x);
}

double scaled(double norm, double fval) {
  return norm / std::max(1.0, std::abs(fval));
}

// L-BFGS two-loop recursion over the stored (s, y) pairs.
Vec lbfgs_direction(const std::deque<Vec>& ss, const std::deque<Vec>& ys,
                    const Vec& g) {
  Vec q = g;
  const int m = static_cast<int>(ss.size());
  std::vector<double> alpha(m), rho(m);
  for (int i = m - 1; i >= 0; --i) {
    rho[i] = 1.0 / ys[i].dot(ss[i]);
    alpha[i] = rho[i] * ss[i].dot(q);
    q -= alpha[i] * ys[i];
  }
  if (m > 0) {
    const double gamma = ss.back().dot(ys.back()) / ys.back().squaredNorm();
    q *= gamma;
  }
  for (int i = 0; i < m; ++i) {
    const double beta = rho[i] * ys[i].dot(q);
    q += (alpha[i] - beta) * ss[i];
  }
  return q;
}

std::pair<Vec, SolveReport> minimize_unconstrained(const Objective& f,
                                                   const Vec& x0,
                                                   const SolverOptions& opts) {
  SolveReport rep;
  if (!in_domain(f, x0)) {
    rep.status = SolveStatus::DomainBreach;
    return {x0, rep};
  }
  Vec x = x0;
  double fx = f.value(x);
  Vec g = f.grad(x);
  std::deque<Vec> ss, ys;
  const int memory = 10;

  for (int it = 0; it < opts.max_iter; ++it) {
    rep.iterations = it;
    rep.objective = fx;
    rep.grad_norm = scaled(g.norm(), fx);
    if (rep.grad_norm < opts.tol) {
      rep.status = SolveStatus::Converged;
      return {x, rep};
    }
    Vec d = -lbfgs_direction(ss, ys, g);
    double dg = d.dot(g);
    if (dg > -1e-16 * d.norm() * g.norm()) {
      d = -g;  // restart on loss of descent direction
      dg = d.dot(g);
      ss.clear();
      ys.clear();
    }
    double t = 1.0;
    Vec xn;
    double fn = 0.0;
    bool ok = false;
    while (t >= kMinStep) {
      xn = x + t * d;
      if (in_domain(f, xn)) {
        fn = f.value(xn);
        if (std::isfinite(fn) &&
            fn <= fx + kArmijo * t * dg + kNoise * std::abs(fx)) {
          ok = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!ok) {
      // No further progress possible at this scale.
      rep.status = rep.grad_norm < std::sqrt(opts.tol) ? SolveStatus::Converged
                                                       : SolveStatus::MaxIter;
      return {x, rep};
    }
    Vec gn = f.grad(xn);
    Vec s = xn - x;
    Vec y = gn - g;
    if (y.dot(s) > 1e-14 * s.norm() * y.norm()) {
      ss.push_back(std::move(s));
      ys.push_back(std::move(y));
      if (static_cast<int>(ss.size()) > memory) {
        ss.pop_front();
        ys.pop_front();
      }
    }
    x = std::move(xn);
    fx = fn;
    g = std::move(gn);
  }
  rep.iterations = opts.max_iter;
  rep.objective = fx;
  rep.grad_norm = scaled(g.norm(), fx);
  rep.status =
      rep.grad_norm < opts.tol ? SolveStatus::Converged : SolveStatus::MaxIter;
  return {x, rep};
}

std::pair<Vec, SolveReport> minimize_projected(const Objective& f, const Vec& x0,
                                               const ConstraintSet& cs,
                                               const SolverOptions& opts) {
  SolveReport rep;
  Vec x = project(x0, cs);
  if (!in_domain(f, x)) {
    rep.status = SolveStatus::DomainBreach;
    return {x, rep};
  }
  double fx = f.value(x);
  Vec g = f.grad(x);
  double step = 1.0 / std::max(1.0, g.norm());

  for (int it = 0; it < opts.max_iter; ++it) {
    rep.iterations = it;
    rep.objective = fx;
    const double pg = (x - project(x - g, cs)).norm();
    rep.grad_norm = scaled(pg, fx);
    if (rep.grad_norm < opts.tol) {
      rep.status = SolveStatus::Converged;
      return {x, rep};
    }
    double t = step;
    Vec xn;
    double fn = 0.0;
    bool ok = false;
    while (t >= kMinStep) {
      xn = project(x - t * g, cs);
      if (in_domain(f, xn)) {
        fn = f.value(xn);
        if (std::isfinite(fn) &&
            fn <= fx + kArmijo * g.dot(xn - x) + kNoise * std::abs(fx)) {
          ok = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!ok) {
      rep.status = rep.grad_norm < std::sqrt(opts.tol) ? SolveStatus::Converged
                                                       : SolveStatus::MaxIter;
      return {x, rep};
    }
    Vec gn = f.grad(xn);
    const Vec s = xn - x;
    const Vec y = gn - g;
    const double sy = s.dot(y);
    step = sy > 1e-14 * s.norm() * y.norm()
               ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12)
               : 2.0 * t;
    x = std::move(xn);
    fx = fn;
    g = std::move(gn);
  }
  rep.iterations = opts.max_iter;
  rep.objective = fx;
  rep.grad_norm = scaled((x - project(x - g, cs)).norm(), fx);
  rep.status =
      rep.grad_norm < opts.tol ? SolveStatus::Converged : SolveStatus::MaxIter;
  return {x, rep};
}

}  // namespace

Vec project_simplex(const Vec& x, double budget, bool nonneg) {
  const auto n = x.size();
  if (!nonneg) {
    return x.array() - (x.sum() - budget) / static_cast<double>(n);
  }
  if (budget <= 0.0) throw InfeasibleError("simplex budget must be positive");
  std::vector<double> u(x.data(), x.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int j = 0; j < n; ++j) {
    cum += u[j];
    const double cand = (cum - budget) / (j + 1);
    if (u[j] - cand > 0.0) theta = cand;
  }
  return Vec((x.array() - theta).max(0.0));
}

Vec project(const Vec& x, const ConstraintSet& cs) {
  if (cs.empty()) return x;
  const auto n = x.size();
  const double inf = std::numeric_limits<double>::infinity();
  Vec lo = cs.lower ? *cs.lower : Vec::Constant(n, -inf);
  Vec hi = cs.upper ? *cs.upper : Vec::Constant(n, inf);
  if (cs.nonneg) lo = lo.cwiseMax(0.0);
  if ((lo.array() > hi.array()).any()) {
    throw InfeasibleError("lower bound exceeds upper bound");
  }
  if (!cs.budget) {
    return x.cwiseMax(lo).cwiseMin(hi);
  }
  const double budget = *cs.budget;
  // Fast path: plain simplex.
  if (cs.nonneg && !cs.lower && !cs.upper) return project_simplex(x, budget);
  if (!cs.nonneg && !cs.lower && !cs.upper) {
    return project_simplex(x, budget, false);
  }
  // Box + budget: w(lambda) = clip(x - lambda, lo, hi); sum is
  // nonincreasing in lambda, solve sum(w(lambda)) = budget by bisection.
  auto sum_at = [&](double lambda) {
    return ((x.array() - lambda).max(lo.array()).min(hi.array())).sum();
  };
  const double feas_lo = lo.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; }).sum();
  const double feas_hi = hi.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; }).sum();
  const bool lo_finite = lo.allFinite(), hi_finite = hi.allFinite();
  if ((lo_finite && feas_lo > budget) || (hi_finite && feas_hi < budget)) {
    throw InfeasibleError("budget unreachable inside the box");
  }
  double a = -1.0, b = 1.0;
  while (sum_at(a) < budget) a *= 2.0;
  while (sum_at(b) > budget) b *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    (sum_at(mid) >= budget ? a : b) = mid;
  }
  const double lambda = 0.5 * (a + b);
  return (x.array() - lambda).max(lo.array()).min(hi.array());
}

std::pair<Vec, SolveReport> minimize(const Objective& f, const Vec& x0,
                                     const ConstraintSet& cs,
                                     const SolverOptions& opts) {
  if (cs.empty()) return minimize_unconstrained(f, x0, opts);
  return minimize_projected(f, x0, cs, opts);
}

}  // namespace portopt
