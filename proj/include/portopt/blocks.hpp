#pragma once

#include <vector>

#include "portopt/solver.hpp"
#include "portopt/types.hpp"

namespace portopt {

/// Partition of assets into K non-empty blocks; assignments[i] is the
/// zero-based block of asset i.
struct BlockStructure {
  std::vector<int> assignments;
  int num_blocks = 0;

  void validate() const;
  int dim() const { return static_cast<int>(assignments.size()); }
  std::vector<std::vector<int>> members() const;
  std::vector<int> sizes() const;
};

/// Model 1: independent blocks, per-block correlation matrix R_i and
/// per-block shifted-gamma variance noise (sigma_min_sq, sigma_sq, alpha).
struct Model1Spec {
  BlockStructure structure;
  std::vector<double> sigma_min_sq;
  std::vector<double> sigma_sq;
  std::vector<double> alpha;
  std::vector<Mat> correlation;  // one PD unit-diagonal matrix per block

  void validate() const;
};

/// Model 2: one global variance with a single noise level and an
/// equicorrelation block structure: rho(i, j) fills block (i, j).
struct Model2Spec {
  BlockStructure structure;
  double sigma_min_sq = 0.0;
  double sigma_sq = 0.0;
  double alpha = 0.0;
  Mat rho;  // K x K symmetric; diagonal holds within-block correlations

  void validate() const;
};

/// Assembles the full N x N correlation matrix R_2m and verifies positive
/// definiteness.
CovMatrix assemble_block_correlation(const Model2Spec& spec);

/// Dense covariance for Model 1: diag blocks (sigma_min_sq + sigma_sq) R_i.
Mat assemble_model1_covariance(const Model1Spec& spec);

double model1_objective(const Model1Spec& spec, const ReturnBeliefs& beliefs,
                        double a, const Vec& w);
Vec model1_gradient(const Model1Spec& spec, const ReturnBeliefs& beliefs,
                    double a, const Vec& w);

std::pair<Vec, SolveReport> solve_model1(const Model1Spec& spec,
                                         const ReturnBeliefs& beliefs, double a,
                                         const ConstraintSet& cs = {},
                                         const SolverOptions& opts = {});

double model2_objective(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                        double a, const Vec& w);
Vec model2_gradient(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                    double a, const Vec& w);

struct Model2Solution {
  Vec weights;        // length N
  Vec block_weights;  // length K
  SolveReport report;
};

/// reduced = true exploits the within-block symmetry and optimizes the K
/// block weights; requires block-constant beliefs (SymmetryViolationError
/// otherwise) and an empty constraint set. reduced = false optimizes in
/// full dimension.
Model2Solution solve_model2(const Model2Spec& spec, const ReturnBeliefs& beliefs,
                            double a, const ConstraintSet& cs = {},
                            bool reduced = true,
                            const SolverOptions& opts = {});

/// Contraction of w' R_2m w onto block weights: B(i,i) = m_i (1 + (m_i-1)
/// rho_ii), B(i,j) = m_i m_j rho_ij. Exposed for testing against the dense
/// quadratic form.
Mat model2_reduced_quadratic(const Model2Spec& spec);

}  // namespace portopt
