#include "portopt/distributions.hpp"

#include <cmath>

namespace portopt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

void ShiftedGammaNoise::validate() const {
  if (!(alpha > 0.0) || !(sigma2 > 0.0) || sigma2_min < 0.0) {
    throw DomainError("shifted gamma noise requires alpha > 0, sigma2 > 0, sigma2_min >= 0");
  }
}

void WishartNoiseModel::validate() const {
  if (!(alpha > 0.0)) throw DomainError("Wishart noise requires alpha > 0");
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(index + 1)));
}

double RngStream::uniform01() {
  // 53-bit mantissa, open interval (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw DomainError("gamma sampler requires positive shape and scale");
  }
  if (shape < 1.0) {
    const double u = uniform01();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

double RngStream::chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

std::vector<double> sample_shifted_gamma(const ShiftedGammaNoise& model,
                                         RngStream& rng, int n) {
  model.validate();
  if (n < 1) throw DomainError("sample count must be >= 1");
  std::vector<double> out(n);
  const double shape = 0.5 * model.alpha;
  const double scale = 2.0 * model.sigma2 / model.alpha;
  for (int i = 0; i < n; ++i) {
    out[i] = model.sigma2_min + rng.gamma(shape, scale);
  }
  return out;
}

double shifted_gamma_mgf(const ShiftedGammaNoise& model, double t) {
  model.validate();
  const double bound = model.alpha / (2.0 * model.sigma2);
  if (t >= bound) {
    throw DomainError("shifted gamma mgf diverges for t >= alpha / (2 sigma2)");
  }
  // log1p keeps full relative precision when 2 sigma2 t / alpha is tiny.
  return std::exp(model.sigma2_min * t -
                  0.5 * model.alpha *
                      std::log1p(-2.0 * model.sigma2 * t / model.alpha));
}

Mat sample_wishart_one(const WishartNoiseModel& model, const Mat& chol_scaled,
                       RngStream& rng) {
  const int dim = model.sigma.dim();
  Mat a = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(model.alpha - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Mat la = chol_scaled * a;
  return la * la.transpose();
}

std::vector<Mat> sample_wishart(const WishartNoiseModel& model, RngStream& rng,
                                int n) {
  model.validate();
  const int dim = model.sigma.dim();
  if (model.alpha <= dim - 1) {
    throw DomainError("Bartlett sampling requires alpha > dim - 1");
  }
  if (n < 1) throw DomainError("sample count must be >= 1");
  const Mat scaled = model.sigma.matrix() / model.alpha;
  Eigen::LLT<Mat> llt(scaled);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("Sigma/alpha has no Cholesky factor");
  }
  const Mat l = llt.matrixL();
  std::vector<Mat> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(sample_wishart_one(model, l, rng));
  return out;
}

double wishart_mgf(const WishartNoiseModel& model, const Vec& w, double a) {
  model.validate();
  const double quad = w.dot(model.sigma.matrix() * w);
  const double x = (a * a / model.alpha) * quad;
  if (x >= 1.0) {
    throw DomainError("Wishart mgf diverges: (a^2/alpha) w'Sigma w >= 1");
  }
  // log1p keeps full relative precision when x is tiny (large alpha).
  return std::exp(-0.5 * model.alpha * std::log1p(-x));
}

double scaled_inv_chi2_pdf(double sigma2, int n, double s2) {
  if (!(sigma2 > 0.0) || !(s2 > 0.0) || n < 2) {
    throw DomainError("scaled inverse chi-squared pdf requires sigma2 > 0, s2 > 0, n >= 2");
  }
  // Inverse gamma with shape (n-1)/2 and rate (n-1) s2 / 2.
  const double shape = 0.5 * (n - 1);
  const double rate = 0.5 * (n - 1) * s2;
  const double log_pdf = shape * std::log(rate) - std::lgamma(shape) -
                         (shape + 1.0) * std::log(sigma2) - rate / sigma2;
  return std::exp(log_pdf);
}

double hyp2f1(double a, double b, double c, double z) {
  if (!(c > 0.0) || z < 0.0 || z >= 1.0) {
    throw DomainError("hyp2f1 implemented for c > 0 and z in [0, 1)");
  }
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 100000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-15 * std::abs(sum)) return sum;
  }
  throw ConvergenceError("hyp2f1 series did not converge in 1e5 terms");
}

double conditional_correlation_pdf(double rho, double r, int n) {
  if (!(rho > -1.0 && rho < 1.0) || !(r > -1.0 && r < 1.0) || n < 3) {
    throw DomainError("correlation pdf requires rho, r in (-1, 1) and n >= 3");
  }
  const double nu = n - 1.0;
  const double log_const = std::lgamma(nu + 1.0) - 0.5 * std::log(kTwoPi) -
                           std::lgamma(nu + 0.5);
  const double log_kernel = 0.5 * (nu - 1.0) * std::log1p(-r * r) +
                            0.5 * (nu - 2.0) * std::log1p(-rho * rho) +
                            0.5 * (1.0 - 2.0 * nu) * std::log1p(-r * rho);
  const double f = hyp2f1(1.5, -0.5, nu + 0.5, 0.5 * (1.0 + r * rho));
  return std::exp(log_const + log_kernel) * f;
}

}  // namespace portopt
