#pragma once

#include <Eigen/Dense>

#include "portopt/errors.hpp"

namespace portopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Validated covariance matrix: symmetric and positive semidefinite.
///
/// Construction rejects non-symmetric input (never silently symmetrizes)
/// and matrices whose minimum eigenvalue falls below -1e-10. Downstream
/// closed forms assume invertibility, so borderline matrices are rejected
/// with a distinct error rather than projected.
class CovMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;
  static constexpr double kMinEigTol = -1e-10;

  explicit CovMatrix(Mat m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double min_eigenvalue() const { return min_eig_; }
  double max_eigenvalue() const { return max_eig_; }
  double condition_number() const;

  /// Throws SingularMatrixError when the condition number exceeds the
  /// threshold (default 1e12) or the matrix is not strictly PD.
  void require_invertible(double max_condition = 1e12) const;

  /// Throws DomainError unless every diagonal entry is strictly positive.
  void require_positive_diagonal() const;

 private:
  Mat m_;
  double min_eig_ = 0.0;
  double max_eig_ = 0.0;
};

/// Beliefs about expected excess returns: mean vector mu0 and a diagonal
/// uncertainty matrix Sigma0 stored as its diagonal.
struct ReturnBeliefs {
  Vec mu0;
  Vec sigma0_diag;

  int dim() const { return static_cast<int>(mu0.size()); }
  void validate() const;
};

/// Quadratic transaction-cost penalty eta/2 * |w - w0|^2.
struct TransactionCost {
  double eta = 0.0;
  Vec target_weights;
};

/// One allocation problem instance. A nonzero risk-free rate is folded
/// into mu0 at construction (mu0 <- mu0 - r0 * 1); all consumers see
/// excess returns.
class PortfolioProblem {
 public:
  PortfolioProblem(ReturnBeliefs beliefs, CovMatrix sigma, double risk_aversion,
                   double risk_free = 0.0);

  int dim() const { return sigma_.dim(); }
  const Vec& mu0() const { return beliefs_.mu0; }
  const Vec& sigma0_diag() const { return beliefs_.sigma0_diag; }
  const ReturnBeliefs& beliefs() const { return beliefs_; }
  const CovMatrix& sigma() const { return sigma_; }
  double risk_aversion() const { return risk_aversion_; }
  double risk_free() const { return risk_free_; }

 private:
  ReturnBeliefs beliefs_;
  CovMatrix sigma_;
  double risk_aversion_;
  double risk_free_;
};

/// CARA utility (1 - exp(-a x)) / a, continuous in a at 0.
double cara_utility(double x, double a);

/// Exponent of the Gaussian expected utility: 1/2 a^2 w'Sigma w - a mu'w.
/// The expected utility itself is -exp of this; carrying the log form
/// avoids overflow for large a^2 w'Sigma w.
double gaussian_eu_exponent(const PortfolioProblem& p, const Vec& w);

/// -exp(gaussian_eu_exponent). May underflow/overflow for extreme
/// exponents; prefer the log form in optimization loops.
double gaussian_expected_utility(const PortfolioProblem& p, const Vec& w);

/// Absorbs a quadratic turnover penalty into the problem parameters:
/// mu' = mu + (eta/a) w0, Sigma' = Sigma + (eta/a^2) I.
PortfolioProblem apply_transaction_cost(const PortfolioProblem& p,
                                        const TransactionCost& tc);

}  // namespace portopt
