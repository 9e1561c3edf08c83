#include "portopt/mc.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace portopt {
namespace {

constexpr int kChunks = 64;
constexpr double kDivergenceMagnitude = 1e50;

struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  long count = 0;
  bool diverged = false;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++count;
    if (std::abs(v) > kDivergenceMagnitude) diverged = true;
  }

  MCEstimate estimate() const {
    MCEstimate e;
    e.mean = sum / count;
    const double var = std::max(0.0, sumsq / count - e.mean * e.mean);
    e.se = std::sqrt(var / count);
    e.divergence_warning = diverged;
    return e;
  }
};

// One Rao-Blackwellized draw: quad = w'S w for the sampled covariance,
// mean_term = mu'w for the sampled mu.
double inner_value(double a, double quad, double mean_term) {
  return -std::exp(0.5 * a * a * quad - a * mean_term);
}

}  // namespace

void MCConfig::validate() const {
  if (n_samples < 1000) throw DomainError("MC requires at least 1000 samples");
}

MCEstimate mc_expected_utility(const PortfolioProblem& problem,
                               const NoiseModel& noise, const Vec& w,
                               const MCConfig& cfg) {
  cfg.validate();
  if (w.size() != problem.dim()) throw SchemaError("weight dimension mismatch");
  const double a = problem.risk_aversion();
  const Vec sigma0_sd = problem.sigma0_diag().cwiseSqrt();
  const double mu_w = problem.mu0().dot(w);
  Accumulator acc;
  RngStream base(cfg.seed);

  auto mu_term = [&](RngStream& rng, double sign) {
    double t = mu_w;
    for (int j = 0; j < w.size(); ++j) {
      if (sigma0_sd[j] > 0.0) t += sign * sigma0_sd[j] * rng.normal() * w[j];
    }
    return t;
  };

  if (const auto* wm = std::get_if<WishartNoiseModel>(&noise)) {
    if (wm->sigma.dim() != problem.dim()) {
      throw SchemaError("noise model dimension mismatch");
    }
    const Mat scaled = wm->sigma.matrix() / wm->alpha;
    const Mat chol = Eigen::LLT<Mat>(scaled).matrixL();
    for (int c = 0; c < kChunks; ++c) {
      RngStream rng = base.substream(c);
      const int n = cfg.n_samples / kChunks + (c < cfg.n_samples % kChunks ? 1 : 0);
      for (int i = 0; i < n; ++i) {
        const Mat s = sample_wishart_one(*wm, chol, rng);
        const double quad = w.dot(s * w);
        if (cfg.antithetic) {
          // Antithetic pairing on the Gaussian mu level only.
          RngStream save = rng;
          const double t1 = mu_term(rng, 1.0);
          RngStream replay = save;
          const double t2 = mu_term(replay, -1.0);
          acc.add(0.5 * (inner_value(a, quad, t1) + inner_value(a, quad, t2)));
        } else {
          acc.add(inner_value(a, quad, mu_term(rng, 1.0)));
        }
      }
    }
    return acc.estimate();
  }

  if (const auto* sg = std::get_if<ShiftedGammaNoise>(&noise)) {
    if (problem.dim() != 1) {
      throw SchemaError("shifted gamma noise applies to univariate problems");
    }
    sg->validate();
    const double shape = 0.5 * sg->alpha;
    const double scale = 2.0 * sg->sigma2 / sg->alpha;
    for (int c = 0; c < kChunks; ++c) {
      RngStream rng = base.substream(c);
      const int n = cfg.n_samples / kChunks + (c < cfg.n_samples % kChunks ? 1 : 0);
      for (int i = 0; i < n; ++i) {
        const double s2 = sg->sigma2_min + rng.gamma(shape, scale);
        const double quad = s2 * w[0] * w[0];
        if (cfg.antithetic) {
          RngStream save = rng;
          const double t1 = mu_term(rng, 1.0);
          RngStream replay = save;
          const double t2 = mu_term(replay, -1.0);
          acc.add(0.5 * (inner_value(a, quad, t1) + inner_value(a, quad, t2)));
        } else {
          acc.add(inner_value(a, quad, mu_term(rng, 1.0)));
        }
      }
    }
    return acc.estimate();
  }

  const auto& sc = std::get<TwoStateScenario>(noise);
  sc.validate();
  if (sc.dim() != problem.dim()) throw SchemaError("scenario dimension mismatch");
  // Both conditional values are deterministic; only the state is random.
  const double vn = inner_value(sc.a, w.dot(sc.sigma_n.matrix() * w), sc.mu_n.dot(w));
  const double vs = inner_value(sc.a, w.dot(sc.sigma_s.matrix() * w), sc.mu_s.dot(w));
  for (int c = 0; c < kChunks; ++c) {
    RngStream rng = base.substream(c);
    const int n = cfg.n_samples / kChunks + (c < cfg.n_samples % kChunks ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      acc.add(rng.uniform01() < sc.p ? vn : vs);
    }
  }
  return acc.estimate();
}

MCEstimate mc_expected_utility_univariate(double mu0, double sigma0_sq,
                                          const ShiftedGammaNoise& noise,
                                          double a, double w,
                                          const MCConfig& cfg) {
  ReturnBeliefs b{Vec::Constant(1, mu0), Vec::Constant(1, sigma0_sq)};
  // Sigma in the problem container is unused by the sampler; the sampled
  // variance replaces it. Use the noise mean for validity.
  CovMatrix sigma(Mat::Constant(1, 1, noise.sigma2_min + noise.sigma2));
  PortfolioProblem problem(std::move(b), std::move(sigma), a);
  return mc_expected_utility(problem, noise, Vec::Constant(1, w), cfg);
}

double grid_maximize_1d(const std::function<double(double)>& f, double lo,
                        double hi, int resolution) {
  if (!(hi > lo) || resolution < 2) {
    throw DomainError("grid_maximize_1d requires hi > lo and resolution >= 2");
  }
  auto safe = [&f](double x) {
    try {
      const double v = f(x);
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= resolution; ++i) {
    const double x = lo + (hi - lo) * i / resolution;
    const double v = safe(x);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / resolution;
  double b = lo + (hi - lo) * std::min(resolution, best + 1) / resolution;

  // Golden-section narrowing.
  const double phi = 0.6180339887498949;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = safe(x1), f2 = safe(x2);
  for (int i = 0; i < 80 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = safe(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = safe(x1);
    }
  }
  double x = 0.5 * (a + b);

  // Final polish: bisection on a central-difference derivative, which
  // locates the stationary point more accurately than the flat top of
  // the objective itself.
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  auto deriv = [&](double t) { return (safe(t + h) - safe(t - h)) / (2.0 * h); };
  double da = x - 64.0 * h, db = x + 64.0 * h;
  if (deriv(da) > 0.0 && deriv(db) < 0.0) {
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (da + db);
      (deriv(mid) > 0.0 ? da : db) = mid;
    }
    x = 0.5 * (da + db);
  }
  return x;
}

Vec grid_maximize(const std::function<double(const Vec&)>& f, const Vec& lo,
                  const Vec& hi, int resolution) {
  const int dim = static_cast<int>(lo.size());
  if (dim < 1 || dim > 3) throw DomainError("grid_maximize supports dim 1..3");
  auto safe = [&f](const Vec& x) {
    try {
      const double v = f(x);
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  Vec best = lo;
  double best_v = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(dim, 0);
  for (;;) {
    Vec x(dim);
    for (int d = 0; d < dim; ++d) {
      x[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / resolution;
    }
    const double v = safe(x);
    if (v > best_v) {
      best_v = v;
      best = x;
    }
    int d = 0;
    while (d < dim && ++idx[d] > resolution) idx[d++] = 0;
    if (d == dim) break;
  }

  // Cyclic coordinate refinement with a shrinking trust radius.
  Vec x = best;
  Vec r = (hi - lo) / resolution;
  for (int sweep = 0; sweep < 200 && r.maxCoeff() > 1e-12; ++sweep) {
    for (int d = 0; d < dim; ++d) {
      Vec probe = x;
      auto f1 = [&](double t) {
        probe[d] = t;
        return safe(probe);
      };
      x[d] = grid_maximize_1d(f1, x[d] - r[d], x[d] + r[d], 16);
    }
    r *= 0.5;
  }
  return x;
}

Vec simplex_grid_search(const std::function<double(const Vec&)>& f, int dim,
                        double step, double budget) {
  if (dim < 2 || dim > 3) throw DomainError("simplex_grid_search supports dim 2..3");
  const int n = static_cast<int>(std::round(budget / step));
  Vec best;
  double best_v = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& w) {
    const double v = f(w);
    if (std::isfinite(v) && v > best_v) {
      best_v = v;
      best = w;
    }
  };
  if (dim == 2) {
    for (int i = 0; i <= n; ++i) {
      Vec w(2);
      w << i * step, budget - i * step;
      consider(w);
    }
  } else {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n - i; ++j) {
        Vec w(3);
        w << i * step, j * step, budget - (i + j) * step;
        consider(w);
      }
    }
  }
  return best;
}

}  // namespace portopt
