#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "portopt/types.hpp"

namespace portopt {

/// Variance noise model: Gamma(alpha/2, 2 sigma2/alpha) + sigma2_min.
/// Mean sigma2_min + sigma2, variance 2 sigma2^2 / alpha.
struct ShiftedGammaNoise {
  double alpha;
  double sigma2;
  double sigma2_min = 0.0;

  void validate() const;
};

/// Covariance noise model: S ~ W_N(alpha, Sigma/alpha), so E[S] = Sigma
/// and alpha controls the spread around the target.
struct WishartNoiseModel {
  double alpha;
  CovMatrix sigma;

  void validate() const;
};

/// Seeded random stream. Identical seed gives a byte-identical sample
/// sequence; substreams derived from the seed support deterministic
/// partitioned Monte Carlo independent of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream substream(std::uint64_t index) const;

  double uniform01();
  double normal();
  /// Marsaglia-Tsang; shape may be fractional.
  double gamma(double shape, double scale);
  double chi_squared(double dof);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::vector<double> sample_shifted_gamma(const ShiftedGammaNoise& model,
                                         RngStream& rng, int n);

/// E[exp(t s^2)] = exp(sigma2_min t) (1 - 2 sigma2 t / alpha)^(-alpha/2).
/// Throws DomainError at or beyond t = alpha / (2 sigma2).
double shifted_gamma_mgf(const ShiftedGammaNoise& model, double t);

/// Bartlett-decomposition sampler; requires alpha > dim - 1.
std::vector<Mat> sample_wishart(const WishartNoiseModel& model, RngStream& rng,
                                int n);
Mat sample_wishart_one(const WishartNoiseModel& model, const Mat& chol_scaled,
                       RngStream& rng);

/// E[exp(a^2/2 w'S w)] = (1 - (a^2/alpha) w'Sigma w)^(-alpha/2), using the
/// rank-one determinant identity. Throws DomainError outside convergence.
double wishart_mgf(const WishartNoiseModel& model, const Vec& w, double a);

/// Posterior density of the population variance given sample variance s2
/// from n Gaussian observations (scaled inverse chi-squared, nu = n - 1).
/// Normalized analytically via the gamma function.
double scaled_inv_chi2_pdf(double sigma2, int n, double s2);

/// Posterior density of the population correlation rho given sample
/// correlation r from n bivariate Gaussian observations.
double conditional_correlation_pdf(double rho, double r, int n);

/// Gauss hypergeometric series for z in [0, 1); truncated at relative
/// 1e-15, throws ConvergenceError after 1e5 terms.
double hyp2f1(double a, double b, double c, double z);

}  // namespace portopt
