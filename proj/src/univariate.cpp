#include "portopt/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <vector>

namespace portopt {

void UnivariateProblem::validate() const {
  if (!(sigma_sq > 0.0) || !(alpha > 0.0) || !(a > 0.0)) {
    throw DomainError("univariate problem requires sigma_sq, alpha, a > 0");
  }
  if (sigma0_sq < 0.0 || sigma_min_sq < 0.0) {
    throw DomainError("sigma0_sq and sigma_min_sq must be nonnegative");
  }
  if (!std::isfinite(mu0)) throw DomainError("mu0 must be finite");
}

double UnivariateProblem::weight_bound() const {
  return std::sqrt(alpha / sigma_sq) / a;
}

double marginal_expected_utility_log(const UnivariateProblem& p, double w) {
  p.validate();
  const double x = (p.a * p.a / p.alpha) * w * w * p.sigma_sq;
  if (x >= 1.0) {
    throw DomainError("weight outside admissible domain |w| < sqrt(alpha)/(a sigma)");
  }
  // log1p keeps full relative precision when x is tiny (large alpha).
  return 0.5 * p.a * p.a * (p.sigma_min_sq + p.sigma0_sq) * w * w -
         p.a * p.mu0 * w - 0.5 * p.alpha * std::log1p(-x);
}

namespace {

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, trigonometric/Cardano method.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  if (std::abs(c3) <= 1e-14 * scale) {
    if (std::abs(c2) <= 1e-14 * std::max(std::abs(c1), std::abs(c0))) {
      if (c1 != 0.0) roots.push_back(-c0 / c1);
      return roots;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    // Stable quadratic formula.
    const double q = -0.5 * (c1 + std::copysign(sq, c1));
    roots.push_back(q / c2);
    if (q != 0.0) roots.push_back(c0 / q);
    return roots;
  }
  const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
  // Depressed cubic t^3 + p t + q with x = t - b/3.
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double shift = -b / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + sq);
    const double v = std::cbrt(-q / 2.0 - sq);
    roots.push_back(u + v + shift);
  } else if (p == 0.0 && q == 0.0) {
    roots.push_back(shift);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift);
    }
  }
  return roots;
}

}  // namespace

double solve_cubic(const UnivariateProblem& p) {
  p.validate();
  if (p.mu0 == 0.0) return 0.0;  // odd symmetry of the objective
  const double a = p.a;
  const double t0 = p.sigma_min_sq + p.sigma0_sq;
  const double c3 = a * a * a * t0 * p.sigma_sq;
  const double c2 = -a * a * p.mu0 * p.sigma_sq;
  const double c1 = -a * p.alpha * (p.sigma_sq + t0);
  const double c0 = p.mu0 * p.alpha;
  const double bound = p.weight_bound() * (1.0 - 1e-12);

  std::vector<double> roots = real_cubic_roots(c3, c2, c1, c0);
  double best_w = 0.0;
  double best_l = 0.0;
  bool found = false;
  int admissible = 0;
  for (double w : roots) {
    if (!(std::abs(w) < bound)) continue;
    ++admissible;
    const double l = marginal_expected_utility_log(p, w);
    if (!found || l < best_l) {
      found = true;
      best_w = w;
      best_l = l;
    }
  }
  if (!found) {
    throw DomainError("no admissible real root of the optimality cubic");
  }
  if (admissible > 1) {
    std::cerr << "portopt: " << admissible
              << " admissible stationary points; picked the objective maximizer\n";
  }
  return best_w;
}

double asymptotic_weight(const UnivariateProblem& p, AsymptoticRegime regime) {
  p.validate();
  const double a = p.a;
  const double mu = p.mu0;
  const double total = p.sigma_min_sq + p.sigma0_sq + p.sigma_sq;
  const double sigma = std::sqrt(p.sigma_sq);
  switch (regime) {
    case AsymptoticRegime::MuSmall:
    case AsymptoticRegime::AlphaLarge:
      return mu / (a * total) -
             p.sigma_sq * p.sigma_sq * mu * mu * mu /
                 (a * p.alpha * total * total * total * total);
    case AsymptoticRegime::MuLarge:
    case AsymptoticRegime::AlphaSmall:
      return std::sqrt(p.alpha) / (a * sigma) - p.alpha / (2.0 * a * mu);
    case AsymptoticRegime::Sigma0Large:
      return mu / (a * p.sigma0_sq) -
             mu * (p.sigma_min_sq + p.sigma_sq) /
                 (a * p.sigma0_sq * p.sigma0_sq);
    case AsymptoticRegime::Sigma0Small:
      return (-sigma * p.alpha +
              std::sqrt(p.alpha * (4.0 * mu * mu + p.sigma_sq * p.alpha))) /
             (2.0 * a * mu * sigma);
  }
  throw DomainError("unknown asymptotic regime");
}

}  // namespace portopt
