#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "portopt/mc.hpp"
#include "portopt/scenario.hpp"

using namespace portopt;

namespace {

Mat cov2(double v1, double v2, double c) {
  Mat m(2, 2);
  m << v1, c, c, v2;
  return m;
}

TwoStateScenario reference_scenario(double p, double a) {
  Vec mu_n(2), mu_s(2);
  mu_n << 0.06, 0.04;
  mu_s << -0.3, -0.25;
  return TwoStateScenario{p, mu_n, CovMatrix(cov2(0.0225, 0.04, 0.009)), mu_s,
                          CovMatrix(cov2(0.2025, 0.25, 0.18)), a};
}

}  // namespace

TEST_CASE("stressed covariance builder") {
  StressedCovSpec spec{0.45, 0.8, 3};
  auto s = build_stressed_cov(spec);
  Eigen::SelfAdjointEigenSolver<Mat> es(s.matrix());
  CHECK(es.eigenvalues()[2] == doctest::Approx(0.2025 * 2.6).epsilon(1e-12));
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.2025 * 0.2).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(0.2025 * 0.2).epsilon(1e-12));

  auto diag = build_stressed_cov(StressedCovSpec{0.45, 0.0, 3});
  CHECK((diag.matrix() - 0.2025 * Mat::Identity(3, 3)).norm() == 0.0);

  CHECK_THROWS_AS(build_stressed_cov(StressedCovSpec{0.45, -0.6, 3}),
                  NotPositiveDefiniteError);

  // Near the PD boundary: accepted, near-singular.
  auto near = build_stressed_cov(StressedCovSpec{0.45, 1.0 - 1e-12, 3});
  CHECK(near.min_eigenvalue() >= 0.0);
}

TEST_CASE("lse basics and single-state reduction") {
  auto sc = reference_scenario(1.0, 2.0);
  Vec w(2);
  w << 0.4, 0.2;
  const double u_n = 0.5 * sc.a * sc.a * w.dot(sc.sigma_n.matrix() * w) -
                     sc.a * sc.mu_n.dot(w);
  CHECK(lse_objective(sc, w) == doctest::Approx(u_n).epsilon(1e-14));

  auto [w_opt, report] = solve_two_state(sc);
  const Vec mv = sc.sigma_n.matrix().ldlt().solve(sc.mu_n) / sc.a;
  CHECK(report.status == SolveStatus::Converged);
  CHECK((w_opt - mv).norm() <= 1e-8 * mv.norm());

  auto sc0 = reference_scenario(0.0, 2.0);
  auto [w0, r0] = solve_two_state(sc0);
  const Vec mvs = sc0.sigma_s.matrix().ldlt().solve(sc0.mu_s) / sc0.a;
  CHECK((w0 - mvs).norm() <= 1e-8 * std::max(1.0, mvs.norm()));
}

TEST_CASE("identical states collapse the mixture exactly") {
  Vec mu(2);
  mu << 0.05, 0.04;
  CovMatrix sig(cov2(0.04, 0.09, 0.01));
  TwoStateScenario sc{0.37, mu, sig, mu, sig, 1.5};
  Vec w(2);
  w << 0.3, 0.1;
  const double u = 0.5 * sc.a * sc.a * w.dot(sig.matrix() * w) - sc.a * mu.dot(w);
  CHECK(lse_objective(sc, w) == doctest::Approx(u).epsilon(1e-14));
}

TEST_CASE("sandwich bounds hold at every point") {
  auto sc = reference_scenario(0.9, 3.0);
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int t = 0; t < 10000; ++t) {
    Vec w(2);
    w << n(gen), n(gen);
    auto [u_n, u_s] = state_exponents(sc, w);
    const double m = std::max(u_n, u_s);
    const double lse = lse_objective(sc, w);
    CHECK(lse >= m);
    CHECK(lse <= m + std::log(2.0));
  }
}

TEST_CASE("convexity probe") {
  auto sc = reference_scenario(0.8, 2.0);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Vec w1(2), w2(2);
    w1 << n(gen), n(gen);
    w2 << n(gen), n(gen);
    const double lam = u01(gen);
    const double lhs = lse_objective(sc, Vec(lam * w1 + (1.0 - lam) * w2));
    const double rhs =
        lam * lse_objective(sc, w1) + (1.0 - lam) * lse_objective(sc, w2);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("one-dimensional low risk aversion formula") {
  const double p = 0.9, mu_n = 0.06, mu_s = -0.3, sn = 0.15, ss = 0.45;
  const double a = 1e-3;
  TwoStateScenario sc{p,
                      Vec::Constant(1, mu_n),
                      CovMatrix(Mat::Constant(1, 1, sn * sn)),
                      Vec::Constant(1, mu_s),
                      CovMatrix(Mat::Constant(1, 1, ss * ss)),
                      a};
  const double denom = p * sn * sn + (1.0 - p) * ss * ss +
                       p * (1.0 - p) * (mu_n - mu_s) * (mu_n - mu_s);
  CHECK(denom == doctest::Approx(0.052164).epsilon(1e-10));
  const double limit = (p * mu_n + (1.0 - p) * mu_s) / (a * denom);

  const Vec w_limit = low_a_limit_weights(sc);
  CHECK(w_limit[0] == doctest::Approx(limit).epsilon(1e-12));

  // The exact minimizer scales as 1/a, so the quadratic-expansion formula
  // is approached as the state returns shrink (a*w* small), not as a alone
  // shrinks. At one tenth of the reference returns the formula is accurate
  // to well under 1%.
  const double s = 0.1;
  TwoStateScenario small = sc;
  small.mu_n *= s;
  small.mu_s *= s;
  auto [w, report] = solve_two_state(small);
  const Vec small_limit = low_a_limit_weights(small);
  CHECK(report.status == SolveStatus::Converged);
  CHECK(w[0] == doctest::Approx(small_limit[0]).epsilon(0.01));
}

TEST_CASE("low-a residual shrinks as the state returns shrink") {
  double prev = 1e300;
  for (double s : {1.0, 0.5, 0.25, 0.1}) {
    auto sc = reference_scenario(0.9, 1e-3);
    sc.mu_n *= s;
    sc.mu_s *= s;
    auto [w, report] = solve_two_state(sc);
    const double resid = (w - low_a_limit_weights(sc)).norm() /
                         low_a_limit_weights(sc).norm();
    CHECK(resid < prev);
    prev = resid;
  }
}

TEST_CASE("low-a limit degenerate forms") {
  auto sc1 = reference_scenario(1.0, 1.0);
  const Vec mv = sc1.sigma_n.matrix().ldlt().solve(sc1.mu_n);
  CHECK((low_a_limit_weights(sc1) - mv).norm() <= 1e-12 * mv.norm());

  Vec mu(2);
  mu << 0.05, 0.04;
  TwoStateScenario same_mu{0.6, mu, CovMatrix(cov2(0.04, 0.09, 0.01)), mu,
                           CovMatrix(cov2(0.16, 0.25, 0.05)), 1.0};
  Mat mix = 0.6 * cov2(0.04, 0.09, 0.01) + 0.4 * cov2(0.16, 0.25, 0.05);
  const Vec ref = mix.ldlt().solve(mu);
  CHECK((low_a_limit_weights(same_mu) - ref).norm() <= 1e-12 * ref.norm());
}

TEST_CASE("high risk aversion approaches the state-max minimizer") {
  const double a = 1000.0;
  auto sc = reference_scenario(0.9, a);
  auto [w, report] = solve_two_state(sc);
  CHECK(report.status == SolveStatus::Converged);
  // LSE optimum lies within the log 2 envelope of the max-state optimum.
  auto max_obj = [&](const Vec& x) {
    const double mn = 0.5 * a * a * x.dot(sc.sigma_n.matrix() * x) -
                      a * sc.mu_n.dot(x) + std::log(sc.p);
    const double ms = 0.5 * a * a * x.dot(sc.sigma_s.matrix() * x) -
                      a * sc.mu_s.dot(x) + std::log(1.0 - sc.p);
    return std::max(mn, ms);
  };
  const Vec w_direct = grid_maximize(
      [&](const Vec& x) { return -max_obj(x); },
      Vec::Constant(2, -0.01), Vec::Constant(2, 0.01), 50);
  CHECK(max_obj(w) <= max_obj(w_direct) + std::log(2.0));
}

TEST_CASE("min variance on the simplex") {
  Vec mu(3);
  mu << 0.05, 0.04, 0.03;
  Mat sn = Mat::Zero(3, 3);
  sn.diagonal() << 0.01, 0.04, 0.09;
  auto ss = build_stressed_cov(StressedCovSpec{0.45, 0.8, 3});
  TwoStateScenario sc{1.0, mu, CovMatrix(sn), mu, ss, 1.0};

  auto [w, report] = min_variance_two_state(sc);
  CHECK(report.status == SolveStatus::Converged);
  Vec inv(3);
  inv << 1.0 / 0.01, 1.0 / 0.04, 1.0 / 0.09;
  const Vec ref = inv / inv.sum();
  CHECK((w - ref).norm() <= 1e-6);

  auto [w_ridge, rr] = min_variance_two_state(sc, 1e6);
  CHECK((w_ridge - Vec::Constant(3, 1.0 / 3)).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("mixture min variance matches the simplex grid") {
  Vec mu(3);
  mu << 0.05, 0.04, 0.03;
  Mat sn(3, 3);
  sn << 0.01, 0.002, 0.0, 0.002, 0.04, 0.005, 0.0, 0.005, 0.09;
  auto ss = build_stressed_cov(StressedCovSpec{0.45, 0.8, 3});
  TwoStateScenario sc{0.5, mu, CovMatrix(sn), mu, ss, 1.0};
  auto [w, report] = min_variance_two_state(sc);
  const Mat mix = 0.5 * sn + 0.5 * ss.matrix();
  const Vec w_grid = simplex_grid_search(
      [&](const Vec& x) { return -x.dot(mix * x); }, 3, 1e-3);
  CHECK((w - w_grid).lpNorm<Eigen::Infinity>() <= 2e-3);
}

TEST_CASE("min variance shrinks toward the stressed matrix as p falls") {
  Vec mu(3);
  mu << 0.05, 0.04, 0.03;
  Mat sn(3, 3);
  sn << 0.01, 0.002, 0.0, 0.002, 0.04, 0.005, 0.0, 0.005, 0.09;
  auto ss = build_stressed_cov(StressedCovSpec{0.45, 0.8, 3});
  double prev = 1e300;
  for (double p : {1.0, 0.75, 0.5, 0.25, 0.0}) {
    TwoStateScenario sc{p, mu, CovMatrix(sn), mu, ss, 1.0};
    auto [w, report] = min_variance_two_state(sc);
    const double stressed_risk = w.dot(ss.matrix() * w);
    CHECK(stressed_risk <= prev + 1e-10);
    prev = stressed_risk;
  }
}

TEST_CASE("minimax uniform at zero risk weight") {
  auto sigma = build_stressed_cov(StressedCovSpec{0.3, 0.4, 4});
  auto [w, report] = minimax_portfolio(sigma, 0.0);
  CHECK(report.status == SolveStatus::Converged);
  CHECK((w - Vec::Constant(4, 0.25)).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("minimax large b approaches long-only min variance") {
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 0.01, 0.04, 0.09;
  CovMatrix sigma(d);
  auto [w, report] = minimax_portfolio(sigma, 1e6);
  Vec inv(3);
  inv << 100.0, 25.0, 100.0 / 9.0;
  const Vec ref = inv / inv.sum();
  CHECK((w - ref).lpNorm<Eigen::Infinity>() <= 1e-3);
}

TEST_CASE("minimax matches the simplex grid at moderate b") {
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 0.01, 0.04, 0.09;
  CovMatrix sigma(d);
  const double b = 10.0;
  auto [w, report] = minimax_portfolio(sigma, b);
  const Vec w_grid = simplex_grid_search(
      [&](const Vec& x) {
        return -(x.lpNorm<Eigen::Infinity>() + 0.5 * b * x.dot(d * x));
      },
      3, 1e-3);
  CHECK((w - w_grid).lpNorm<Eigen::Infinity>() <= 2e-3);
}
