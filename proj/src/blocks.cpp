#include "portopt/blocks.hpp"

#include <cmath>

namespace portopt {

void BlockStructure::validate() const {
  if (assignments.empty() || num_blocks <= 0) {
    throw SchemaError("block structure must be non-empty");
  }
  std::vector<int> count(num_blocks, 0);
  for (int b : assignments) {
    if (b < 0 || b >= num_blocks) {
      throw SchemaError("block assignment out of range");
    }
    ++count[b];
  }
  for (int k = 0; k < num_blocks; ++k) {
    if (count[k] == 0) {
      throw SchemaError("block " + std::to_string(k) + " is empty");
    }
  }
}

std::vector<std::vector<int>> BlockStructure::members() const {
  std::vector<std::vector<int>> out(num_blocks);
  for (int i = 0; i < dim(); ++i) out[assignments[i]].push_back(i);
  return out;
}

std::vector<int> BlockStructure::sizes() const {
  std::vector<int> out(num_blocks, 0);
  for (int b : assignments) ++out[b];
  return out;
}

void Model1Spec::validate() const {
  structure.validate();
  const auto sizes = structure.sizes();
  const auto k = static_cast<std::size_t>(structure.num_blocks);
  if (sigma_min_sq.size() != k || sigma_sq.size() != k || alpha.size() != k ||
      correlation.size() != k) {
    throw SchemaError("Model 1 per-block parameter arrays must have length K");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (sigma_min_sq[i] < 0.0 || !(sigma_sq[i] > 0.0) || !(alpha[i] > 0.0)) {
      throw DomainError("Model 1 block " + std::to_string(i) +
                        ": requires sigma_min_sq >= 0, sigma_sq > 0, alpha > 0");
    }
    const Mat& r = correlation[i];
    if (r.rows() != sizes[i] || r.cols() != sizes[i]) {
      throw SchemaError("Model 1 block " + std::to_string(i) +
                        " correlation matrix size mismatch");
    }
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
      if (std::abs(r(j, j) - 1.0) > 1e-12) {
        throw SchemaError("Model 1 correlation matrices must have unit diagonal");
      }
    }
    CovMatrix check(r);  // symmetry + PSD
    if (check.min_eigenvalue() <= 0.0) {
      throw NotPositiveDefiniteError("Model 1 block correlation matrix not PD");
    }
  }
}

void Model2Spec::validate() const {
  structure.validate();
  const int k = structure.num_blocks;
  if (rho.rows() != k || rho.cols() != k) {
    throw SchemaError("Model 2 rho must be K x K");
  }
  if (sigma_min_sq < 0.0 || !(sigma_sq > 0.0) || !(alpha > 0.0)) {
    throw DomainError("Model 2 requires sigma_min_sq >= 0, sigma_sq > 0, alpha > 0");
  }
  const auto sizes = structure.sizes();
  for (int i = 0; i < k; ++i) {
    const int m = sizes[i];
    if (m > 1 && rho(i, i) <= -1.0 / (m - 1)) {
      throw NotPositiveDefiniteError("within-block correlation violates PD range");
    }
    for (int j = 0; j < k; ++j) {
      if (std::abs(rho(i, j) - rho(j, i)) > 1e-12 || std::abs(rho(i, j)) >= 1.0) {
        throw SchemaError("Model 2 rho must be symmetric with entries in (-1, 1)");
      }
    }
  }
}

CovMatrix assemble_block_correlation(const Model2Spec& spec) {
  spec.validate();
  const int n = spec.structure.dim();
  Mat r = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r(i, j) = i == j ? 1.0
                       : spec.rho(spec.structure.assignments[i],
                                  spec.structure.assignments[j]);
    }
  }
  CovMatrix out(std::move(r));
  if (out.min_eigenvalue() <= 0.0) {
    throw NotPositiveDefiniteError(
        "assembled block correlation matrix has minimum eigenvalue " +
        std::to_string(out.min_eigenvalue()));
  }
  return out;
}

Mat assemble_model1_covariance(const Model1Spec& spec) {
  spec.validate();
  const int n = spec.structure.dim();
  const auto groups = spec.structure.members();
  Mat out = Mat::Zero(n, n);
  for (int k = 0; k < spec.structure.num_blocks; ++k) {
    const auto& idx = groups[k];
    const double v = spec.sigma_min_sq[k] + spec.sigma_sq[k];
    for (std::size_t p = 0; p < idx.size(); ++p) {
      for (std::size_t q = 0; q < idx.size(); ++q) {
        out(idx[p], idx[q]) = v * spec.correlation[k](p, q);
      }
    }
  }
  return out;
}

namespace {

// Per-block quadratic forms w_i' R_i w_i, accumulated in block order.
std::vector<double> block_quadratics(const Model1Spec& spec, const Vec& w,
                                     std::vector<Vec>* rw_out = nullptr) {
  const auto groups = spec.structure.members();
  std::vector<double> out(spec.structure.num_blocks);
  if (rw_out) rw_out->resize(spec.structure.num_blocks);
  for (int k = 0; k < spec.structure.num_blocks; ++k) {
    const auto& idx = groups[k];
    Vec wk(idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p) wk[p] = w[idx[p]];
    Vec rw = spec.correlation[k] * wk;
    out[k] = wk.dot(rw);
    if (rw_out) (*rw_out)[k] = std::move(rw);
  }
  return out;
}

}  // namespace

double model1_objective(const Model1Spec& spec, const ReturnBeliefs& beliefs,
                        double a, const Vec& w) {
  beliefs.validate();
  if (w.size() != spec.structure.dim() || beliefs.dim() != spec.structure.dim()) {
    throw SchemaError("model1_objective dimension mismatch");
  }
  const auto quad = block_quadratics(spec, w);
  double value = beliefs.mu0.dot(w) -
                 0.5 * a * (beliefs.sigma0_diag.array() * w.array().square()).sum();
  for (int k = 0; k < spec.structure.num_blocks; ++k) {
    const double x = a * a * spec.sigma_sq[k] / spec.alpha[k] * quad[k];
    if (x >= 1.0) {
      throw DomainError("Model 1 objective undefined in block " + std::to_string(k));
    }
    value -= 0.5 * a * spec.sigma_min_sq[k] * quad[k];
    value += spec.alpha[k] / (2.0 * a) * std::log1p(-x);
  }
  return value;
}

Vec model1_gradient(const Model1Spec& spec, const ReturnBeliefs& beliefs,
                    double a, const Vec& w) {
  std::vector<Vec> rw;
  const auto quad = block_quadratics(spec, w, &rw);
  Vec g = beliefs.mu0 - a * (beliefs.sigma0_diag.array() * w.array()).matrix();
  const auto groups = spec.structure.members();
  for (int k = 0; k < spec.structure.num_blocks; ++k) {
    const double arg = 1.0 - a * a * spec.sigma_sq[k] / spec.alpha[k] * quad[k];
    if (arg <= 0.0) {
      throw DomainError("Model 1 gradient undefined in block " + std::to_string(k));
    }
    const double coef = a * spec.sigma_min_sq[k] + a * spec.sigma_sq[k] / arg;
    const auto& idx = groups[k];
    for (std::size_t p = 0; p < idx.size(); ++p) {
      g[idx[p]] -= coef * rw[k][p];
    }
  }
  return g;
}

std::pair<Vec, SolveReport> solve_model1(const Model1Spec& spec,
                                         const ReturnBeliefs& beliefs, double a,
                                         const ConstraintSet& cs,
                                         const SolverOptions& opts) {
  spec.validate();
  beliefs.validate();
  if (!(a > 0.0)) throw DomainError("risk aversion must be positive");

  Objective f;
  f.value = [&](const Vec& w) { return -model1_objective(spec, beliefs, a, w); };
  f.grad = [&](const Vec& w) { return Vec(-model1_gradient(spec, beliefs, a, w)); };
  f.in_domain = [&](const Vec& w) {
    const auto quad = block_quadratics(spec, w);
    for (int k = 0; k < spec.structure.num_blocks; ++k) {
      if (a * a * spec.sigma_sq[k] / spec.alpha[k] * quad[k] >= 1.0) return false;
    }
    return true;
  };

  Mat total = assemble_model1_covariance(spec);
  total.diagonal() += beliefs.sigma0_diag;
  Vec x0 = 0.5 / a * Vec(total.ldlt().solve(beliefs.mu0));
  while (!f.in_domain(x0)) x0 *= 0.5;

  auto [w, rep] = minimize(f, x0, cs, opts);
  rep.objective = -rep.objective;
  if (rep.status == SolveStatus::Infeasible) {
    throw InfeasibleError("Model 1 constraint set infeasible");
  }
  if (rep.status != SolveStatus::Converged) {
    throw ConvergenceError("Model 1 solve did not converge");
  }
  return {w, rep};
}

Mat model2_reduced_quadratic(const Model2Spec& spec) {
  spec.validate();
  const auto sizes = spec.structure.sizes();
  const int k = spec.structure.num_blocks;
  Mat b(k, k);
  for (int i = 0; i < k; ++i) {
    b(i, i) = sizes[i] * (1.0 + (sizes[i] - 1.0) * spec.rho(i, i));
    for (int j = 0; j < k; ++j) {
      if (i != j) b(i, j) = sizes[i] * static_cast<double>(sizes[j]) * spec.rho(i, j);
    }
  }
  return b;
}

namespace {

double model2_objective_impl(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                             double a, const Vec& w, const Mat& r) {
  const double quad = w.dot(r * w);
  const double x = a * a * spec.sigma_sq / spec.alpha * quad;
  if (x >= 1.0) throw DomainError("Model 2 objective undefined at this w");
  return beliefs.mu0.dot(w) -
         0.5 * a * (beliefs.sigma0_diag.array() * w.array().square()).sum() -
         0.5 * a * spec.sigma_min_sq * quad +
         spec.alpha / (2.0 * a) * std::log1p(-x);
}

Vec model2_gradient_impl(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                         double a, const Vec& w, const Mat& r) {
  const Vec rw = r * w;
  const double arg = 1.0 - a * a * spec.sigma_sq / spec.alpha * w.dot(rw);
  if (arg <= 0.0) throw DomainError("Model 2 gradient undefined at this w");
  return beliefs.mu0 - a * (beliefs.sigma0_diag.array() * w.array()).matrix() -
         (a * spec.sigma_min_sq + a * spec.sigma_sq / arg) * rw;
}

std::pair<Vec, SolveReport> model2_solve_dense(const Model2Spec& spec,
                                               const ReturnBeliefs& beliefs,
                                               double a, const Mat& r,
                                               const ConstraintSet& cs,
                                               const SolverOptions& opts) {
  Objective f;
  f.value = [&](const Vec& w) { return -model2_objective_impl(spec, beliefs, a, w, r); };
  f.grad = [&](const Vec& w) { return Vec(-model2_gradient_impl(spec, beliefs, a, w, r)); };
  f.in_domain = [&](const Vec& w) {
    return a * a * spec.sigma_sq / spec.alpha * w.dot(r * w) < 1.0;
  };
  Mat total = (spec.sigma_min_sq + spec.sigma_sq) * r;
  total.diagonal() += beliefs.sigma0_diag;
  Vec x0 = 0.5 / a * Vec(total.ldlt().solve(beliefs.mu0));
  while (!f.in_domain(x0)) x0 *= 0.5;
  auto [w, rep] = minimize(f, x0, cs, opts);
  rep.objective = -rep.objective;
  if (rep.status != SolveStatus::Converged) {
    throw ConvergenceError("Model 2 solve did not converge");
  }
  return {w, rep};
}

}  // namespace

double model2_objective(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                        double a, const Vec& w) {
  beliefs.validate();
  return model2_objective_impl(spec, beliefs, a, w,
                               assemble_block_correlation(spec).matrix());
}

Vec model2_gradient(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                    double a, const Vec& w) {
  beliefs.validate();
  return model2_gradient_impl(spec, beliefs, a, w,
                              assemble_block_correlation(spec).matrix());
}

Model2Solution solve_model2(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                            double a, const ConstraintSet& cs, bool reduced,
                            const SolverOptions& opts) {
  spec.validate();
  beliefs.validate();
  if (beliefs.dim() != spec.structure.dim()) {
    throw SchemaError("belief dimension must match the block structure");
  }
  if (!(a > 0.0)) throw DomainError("risk aversion must be positive");

  Model2Solution sol;
  if (!reduced) {
    const Mat r = assemble_block_correlation(spec).matrix();
    auto [w, rep] = model2_solve_dense(spec, beliefs, a, r, cs, opts);
    sol.weights = w;
    sol.report = rep;
    const auto groups = spec.structure.members();
    sol.block_weights = Vec(spec.structure.num_blocks);
    for (int k = 0; k < spec.structure.num_blocks; ++k) {
      double sum = 0.0;
      for (int i : groups[k]) sum += w[i];
      sol.block_weights[k] = sum / groups[k].size();
    }
    return sol;
  }

  if (!cs.empty()) {
    throw SchemaError("symmetry-reduced Model 2 solve supports only unconstrained problems");
  }
  // Block-constant beliefs are required for the symmetry reduction.
  const auto groups = spec.structure.members();
  const int k = spec.structure.num_blocks;
  Vec mu_b(k), s0_b(k);
  const double mu_scale = std::max(1.0, beliefs.mu0.cwiseAbs().maxCoeff());
  for (int b = 0; b < k; ++b) {
    mu_b[b] = beliefs.mu0[groups[b][0]];
    s0_b[b] = beliefs.sigma0_diag[groups[b][0]];
    for (int i : groups[b]) {
      if (std::abs(beliefs.mu0[i] - mu_b[b]) > 1e-12 * mu_scale ||
          std::abs(beliefs.sigma0_diag[i] - s0_b[b]) > 1e-12) {
        throw SymmetryViolationError(
            "beliefs are not block-constant; use the full-dimension solve");
      }
    }
  }
  const auto sizes = spec.structure.sizes();
  const Mat bq = model2_reduced_quadratic(spec);

  Objective f;
  f.value = [&](const Vec& v) {
    const double quad = v.dot(bq * v);
    const double x = a * a * spec.sigma_sq / spec.alpha * quad;
    if (x >= 1.0) return std::numeric_limits<double>::infinity();
    double val = 0.0;
    for (int b = 0; b < k; ++b) {
      val += sizes[b] * (mu_b[b] * v[b] - 0.5 * a * s0_b[b] * v[b] * v[b]);
    }
    val += -0.5 * a * spec.sigma_min_sq * quad +
           spec.alpha / (2.0 * a) * std::log1p(-x);
    return -val;
  };
  f.grad = [&](const Vec& v) {
    const Vec bv = bq * v;
    const double arg = 1.0 - a * a * spec.sigma_sq / spec.alpha * v.dot(bv);
    Vec g(k);
    for (int b = 0; b < k; ++b) {
      g[b] = sizes[b] * (mu_b[b] - a * s0_b[b] * v[b]);
    }
    g -= (a * spec.sigma_min_sq + a * spec.sigma_sq / arg) * bv;
    return Vec(-g);
  };
  f.in_domain = [&](const Vec& v) {
    return a * a * spec.sigma_sq / spec.alpha * v.dot(bq * v) < 1.0;
  };

  Mat total = (spec.sigma_min_sq + spec.sigma_sq) * bq;
  for (int b = 0; b < k; ++b) total(b, b) += sizes[b] * s0_b[b];
  Vec rhs(k);
  for (int b = 0; b < k; ++b) rhs[b] = sizes[b] * mu_b[b];
  Vec x0 = 0.5 / a * Vec(total.ldlt().solve(rhs));
  while (!f.in_domain(x0)) x0 *= 0.5;

  auto [v, rep] = minimize(f, x0, {}, opts);
  rep.objective = -rep.objective;
  if (rep.status != SolveStatus::Converged) {
    throw ConvergenceError("reduced Model 2 solve did not converge");
  }
  sol.block_weights = v;
  sol.weights = Vec(spec.structure.dim());
  for (int i = 0; i < spec.structure.dim(); ++i) {
    sol.weights[i] = v[spec.structure.assignments[i]];
  }
  sol.report = rep;
  return sol;
}

}  // namespace portopt
