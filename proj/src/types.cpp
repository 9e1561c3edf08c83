#include "portopt/types.hpp"

#include <cmath>
#include <utility>

namespace portopt {

CovMatrix::CovMatrix(Mat m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw SchemaError("covariance matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(m_(i, j) - m_(j, i)) > kSymmetryTol) {
        throw SymmetryViolationError("covariance matrix entry (" +
                                     std::to_string(i) + "," + std::to_string(j) +
                                     ") differs from its transpose by more than 1e-12");
      }
    }
    if (!m_.row(i).allFinite()) {
      throw SchemaError("covariance matrix has non-finite entries");
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  min_eig_ = es.eigenvalues().minCoeff();
  max_eig_ = es.eigenvalues().maxCoeff();
  if (min_eig_ < kMinEigTol) {
    throw NotPositiveDefiniteError(
        "covariance matrix minimum eigenvalue " + std::to_string(min_eig_) +
        " below tolerance -1e-10");
  }
}

double CovMatrix::condition_number() const {
  if (min_eig_ <= 0.0) return std::numeric_limits<double>::infinity();
  return max_eig_ / min_eig_;
}

void CovMatrix::require_invertible(double max_condition) const {
  if (min_eig_ <= 0.0 || max_eig_ / min_eig_ > max_condition) {
    throw SingularMatrixError("covariance matrix condition number exceeds " +
                              std::to_string(max_condition));
  }
}

void CovMatrix::require_positive_diagonal() const {
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (m_(i, i) <= 0.0) {
      throw DomainError("covariance diagonal entry " + std::to_string(i) +
                        " must be strictly positive");
    }
  }
}

void ReturnBeliefs::validate() const {
  if (mu0.size() == 0 || mu0.size() != sigma0_diag.size()) {
    throw SchemaError("mu0 and sigma0_diag must have the same nonzero length");
  }
  if (!mu0.allFinite() || !sigma0_diag.allFinite()) {
    throw SchemaError("return beliefs must be finite");
  }
  if (sigma0_diag.minCoeff() < 0.0) {
    throw DomainError("sigma0 diagonal entries must be nonnegative");
  }
}

PortfolioProblem::PortfolioProblem(ReturnBeliefs beliefs, CovMatrix sigma,
                                   double risk_aversion, double risk_free)
    : beliefs_(std::move(beliefs)),
      sigma_(std::move(sigma)),
      risk_aversion_(risk_aversion),
      risk_free_(risk_free) {
  beliefs_.validate();
  if (beliefs_.dim() != sigma_.dim()) {
    throw SchemaError("belief and covariance dimensions disagree");
  }
  if (!(risk_aversion_ > 0.0) || !std::isfinite(risk_aversion_)) {
    throw DomainError("risk aversion must be strictly positive");
  }
  if (!std::isfinite(risk_free_)) {
    throw DomainError("risk-free rate must be finite");
  }
  if (risk_free_ != 0.0) {
    beliefs_.mu0.array() -= risk_free_;
  }
}

double cara_utility(double x, double a) {
  if (a == 0.0) return x;
  // -expm1 keeps the a -> 0 limit accurate.
  return -std::expm1(-a * x) / a;
}

double gaussian_eu_exponent(const PortfolioProblem& p, const Vec& w) {
  if (w.size() != p.dim()) throw SchemaError("weight dimension mismatch");
  const double a = p.risk_aversion();
  return 0.5 * a * a * w.dot(p.sigma().matrix() * w) - a * p.mu0().dot(w);
}

double gaussian_expected_utility(const PortfolioProblem& p, const Vec& w) {
  return -std::exp(gaussian_eu_exponent(p, w));
}

PortfolioProblem apply_transaction_cost(const PortfolioProblem& p,
                                        const TransactionCost& tc) {
  if (tc.eta < 0.0) throw DomainError("transaction cost eta must be nonnegative");
  if (tc.eta == 0.0) return p;
  if (tc.target_weights.size() != p.dim()) {
    throw SchemaError("transaction cost target weight dimension mismatch");
  }
  const double a = p.risk_aversion();
  ReturnBeliefs b = p.beliefs();
  b.mu0 += (tc.eta / a) * tc.target_weights;
  Mat s = p.sigma().matrix();
  s += (tc.eta / (a * a)) * Mat::Identity(p.dim(), p.dim());
  // risk_free already folded into mu0; do not shift again.
  return PortfolioProblem(std::move(b), CovMatrix(std::move(s)), a, 0.0);
}

}  // namespace portopt
