#include "portopt/validate.hpp"

#include <cmath>

#include "portopt/blocks.hpp"
#include "portopt/scenario.hpp"
#include "portopt/univariate.hpp"
#include "portopt/wishart.hpp"

namespace portopt {
namespace {

ValidationCheck stochastic_check(const std::string& name, double analytic,
                                 const MCEstimate& est) {
  ValidationCheck c;
  c.name = name;
  c.analytic = analytic;
  c.mc_estimate = est.mean;
  c.mc_se = est.se;
  c.z = est.se > 0.0 ? (est.mean - analytic) / est.se : 0.0;
  c.pass = std::abs(c.z) <= 3.0 && !est.divergence_warning;
  return c;
}

ValidationCheck deterministic_check(const std::string& name, double reference,
                                    double computed, double tol) {
  ValidationCheck c;
  c.name = name;
  c.analytic = reference;
  c.mc_estimate = computed;
  c.mc_se = 0.0;
  c.z = 0.0;
  c.pass = std::abs(computed - reference) <= tol;
  return c;
}

PortfolioProblem make_problem(Vec mu0, Vec sigma0, Mat sigma, double a) {
  return PortfolioProblem(ReturnBeliefs{std::move(mu0), std::move(sigma0)},
                          CovMatrix(std::move(sigma)), a);
}

Mat cov2(double v1, double v2, double c) {
  Mat m(2, 2);
  m << v1, c, c, v2;
  return m;
}

/// Monte Carlo stationarity of the closed-form optimum: the sample mean of
/// the utility derivative at w = (1 + bias) g_W w_MV. Unbiased closed form
/// implies mean zero; a 1% bias in g_W shifts the mean by many standard
/// errors.
ValidationCheck gw_stationarity_check(const ValidationConfig& cfg) {
  const double sigma_sq = 0.04, mu0 = 0.05, a = 1.0, alpha = 50.0;
  const double q = mu0 * mu0 / sigma_sq;
  const double g = scaling_g_wishart(q, alpha);
  const double w = (1.0 + cfg.gw_bias) * g * mu0 / (a * sigma_sq);

  constexpr int kChunks = 64;
  double sum = 0.0, sumsq = 0.0;
  RngStream base(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int c = 0; c < kChunks; ++c) {
    RngStream rng = base.substream(c);
    const int n = cfg.n_samples / kChunks + (c < cfg.n_samples % kChunks ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      const double s = rng.chi_squared(alpha) * sigma_sq / alpha;
      const double v =
          -std::exp(0.5 * a * a * w * w * s - a * mu0 * w) * (a * a * w * s - a * mu0);
      sum += v;
      sumsq += v * v;
    }
  }
  const double mean = sum / cfg.n_samples;
  const double var = std::max(0.0, sumsq / cfg.n_samples - mean * mean);
  MCEstimate est{mean, std::sqrt(var / cfg.n_samples), false};
  return stochastic_check("gw_stationarity", 0.0, est);
}

}  // namespace

std::vector<ValidationCheck> run_validation(const ValidationConfig& cfg) {
  std::vector<ValidationCheck> out;
  MCConfig mc;
  mc.n_samples = cfg.n_samples;
  mc.seed = cfg.seed;

  // Zero-noise limit: huge alpha makes the Wishart draw concentrate at
  // Sigma, so the estimate must match the fixed-covariance Gaussian form
  // (with the mu-level variance folded in analytically).
  {
    Mat sigma = cov2(0.04, 0.09, 0.018);
    Vec mu0(2), s0(2), w(2);
    mu0 << 0.05, 0.03;
    s0 << 0.002, 0.001;
    w << 0.8, 0.4;
    const double a = 1.5;
    auto p = make_problem(mu0, s0, sigma, a);
    Mat sig_eff = sigma;
    sig_eff.diagonal() += s0;
    const double analytic =
        -std::exp(0.5 * a * a * w.dot(sig_eff * w) - a * mu0.dot(w));
    NoiseModel noise = WishartNoiseModel{1e12, CovMatrix(sigma)};
    out.push_back(stochastic_check("gaussian_eu_zero_noise", analytic,
                                   mc_expected_utility(p, noise, w, mc)));
  }

  // Wishart mgf identity in dims 1-3 (mu0 = 0 isolates the quadratic term).
  for (int dim = 1; dim <= 3; ++dim) {
    Mat sigma = Mat::Identity(dim, dim) * 0.04;
    for (int i = 0; i + 1 < dim; ++i) sigma(i, i + 1) = sigma(i + 1, i) = 0.01;
    Vec w = Vec::LinSpaced(dim, 1.0, 0.5 + 0.5 * dim);
    const double a = 1.0, alpha = 25.0;
    WishartNoiseModel noise{alpha, CovMatrix(sigma)};
    auto p = make_problem(Vec::Zero(dim), Vec::Zero(dim), sigma, a);
    const double analytic = -wishart_mgf(noise, w, a);
    out.push_back(stochastic_check("wishart_mgf_dim" + std::to_string(dim),
                                   analytic,
                                   mc_expected_utility(p, noise, w, mc)));
  }

  // Full marginalized objective, Wishart noise plus mu uncertainty.
  {
    Mat sigma = cov2(0.04, 0.09, 0.018);
    Vec mu0(2), s0(2), w(2);
    mu0 << 0.05, 0.03;
    s0 << 0.002, 0.001;
    w << 0.7, 0.3;
    const double a = 1.0, alpha = 50.0;
    auto p = make_problem(mu0, s0, sigma, a);
    WishartAllocProblem wp{p, alpha};
    const double analytic = -std::exp(-a * marginalized_objective(wp, w));
    NoiseModel noise = WishartNoiseModel{alpha, CovMatrix(sigma)};
    out.push_back(stochastic_check("wishart_marginalized_dim2", analytic,
                                   mc_expected_utility(p, noise, w, mc)));
  }

  // Shifted-gamma variance noise against its mgf and against the full
  // univariate marginal form.
  {
    ShiftedGammaNoise noise{100.0, 0.0225, 0.01};
    const double a = 1.0, w = 1.2;
    const double analytic = -shifted_gamma_mgf(noise, 0.5 * a * a * w * w);
    out.push_back(stochastic_check(
        "shifted_gamma_mgf", analytic,
        mc_expected_utility_univariate(0.0, 0.0, noise, a, w, mc)));

    UnivariateProblem up{0.05, 0.0025, noise.sigma2, noise.sigma2_min,
                         noise.alpha, a};
    const double marg = -std::exp(marginal_expected_utility_log(up, w));
    out.push_back(stochastic_check(
        "shifted_gamma_marginal", marg,
        mc_expected_utility_univariate(up.mu0, up.sigma0_sq, noise, a, w, mc)));
  }

  // Two-state Bernoulli mixture against the LogSumExp form.
  {
    Vec mu_n(2), mu_s(2), w(2);
    mu_n << 0.06, 0.04;
    mu_s << -0.3, -0.25;
    w << 0.5, 0.3;
    TwoStateScenario sc{0.9, mu_n, CovMatrix(cov2(0.0225, 0.04, 0.009)), mu_s,
                        CovMatrix(cov2(0.2025, 0.25, 0.18)), 1.0};
    auto p = make_problem(mu_n, Vec::Zero(2), sc.sigma_n.matrix(), sc.a);
    const double analytic = -std::exp(lse_objective(sc, w));
    out.push_back(stochastic_check("two_state_lse", analytic,
                                   mc_expected_utility(p, NoiseModel(sc), w, mc)));
  }

  out.push_back(gw_stationarity_check(cfg));

  // Deterministic identities.
  {
    const double sigma_sq = 0.04, a = 1.0;
    const double q = 10.0, alpha = 10.0;
    const double mu0 = std::sqrt(q * sigma_sq);
    UnivariateProblem up{mu0, 0.0, sigma_sq, 0.0, alpha, a};
    const double bound = up.weight_bound();
    const double w_num = grid_maximize_1d(
        [&](double w) { return -marginal_expected_utility_log(up, w); },
        -0.999 * bound, 0.999 * bound, 4000);
    const double g_num = w_num / (mu0 / (a * sigma_sq));
    out.push_back(deterministic_check("g_w_numeric_q10_a10",
                                      scaling_g_wishart(q, alpha), g_num, 1e-6));
  }
  out.push_back(deterministic_check("g_w_limit_q0", 1.0,
                                    scaling_g_wishart(0.0, 50.0), 1e-12));
  out.push_back(deterministic_check("g_laplace_q4", 0.5, scaling_g_laplace(4.0),
                                    1e-12));
  {
    Mat sigma = cov2(0.04, 0.09, 0.02);
    Vec mu0(2);
    mu0 << 0.05, 0.03;
    auto p = make_problem(mu0, Vec::Zero(2), sigma, 2.0);
    WishartAllocProblem wp{p, 50.0};
    const Vec w_closed = solve_weights_no_mu_uncertainty(wp).weights;
    const Vec w_fixed = solve_weights_full(wp).weights;
    out.push_back(deterministic_check("fixed_point_sigma0_zero", 0.0,
                                      (w_closed - w_fixed).norm(), 1e-10));
  }

  return out;
}

bool all_passed(const std::vector<ValidationCheck>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

}  // namespace portopt
