#pragma once

#include <functional>
#include <variant>

#include "portopt/distributions.hpp"
#include "portopt/scenario.hpp"
#include "portopt/types.hpp"

namespace portopt {

struct MCConfig {
  int n_samples = 100000;
  std::uint64_t seed = 1;
  bool antithetic = false;

  void validate() const;
};

struct MCEstimate {
  double mean = 0.0;
  double se = 0.0;
  bool divergence_warning = false;
};

/// Tagged union of the supported covariance noise models.
using NoiseModel = std::variant<WishartNoiseModel, ShiftedGammaNoise, TwoStateScenario>;

/// Monte Carlo estimate of the marginalized expected utility at fixed w.
/// Sampling covers the Sigma and mu levels only; the innermost return
/// integral uses the closed Gaussian form -exp(a^2/2 w'S w - a mu'w)
/// (Rao-Blackwellization). Samples are drawn from a fixed number of
/// substreams in fixed order, so the result depends only on the seed.
MCEstimate mc_expected_utility(const PortfolioProblem& problem,
                               const NoiseModel& noise, const Vec& w,
                               const MCConfig& cfg);

/// Same estimator specialized to the univariate shifted-gamma problem.
MCEstimate mc_expected_utility_univariate(double mu0, double sigma0_sq,
                                          const ShiftedGammaNoise& noise,
                                          double a, double w,
                                          const MCConfig& cfg);

/// 1-D maximizer: dense grid scan, golden-section refinement, then
/// bisection on a central-difference derivative. Accuracy about 1e-9 for
/// well-scaled smooth concave objectives.
double grid_maximize_1d(const std::function<double(double)>& f, double lo,
                        double hi, int resolution = 2000);

/// Dense grid scan plus cyclic coordinate refinement; dim <= 3.
Vec grid_maximize(const std::function<double(const Vec&)>& f, const Vec& lo,
                  const Vec& hi, int resolution = 50);

/// Exhaustive search over the simplex {w >= 0, sum w = budget} with the
/// given step; dim <= 3. Returns the best grid point.
Vec simplex_grid_search(const std::function<double(const Vec&)>& f, int dim,
                        double step, double budget = 1.0);

}  // namespace portopt
