#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "portopt/types.hpp"

namespace portopt {

/// Convex feasible set: optional per-coordinate box, optional budget
/// equality sum(w) = budget, and an optional nonnegativity flag
/// (shorthand for a zero lower bound).
struct ConstraintSet {
  std::optional<Vec> lower;
  std::optional<Vec> upper;
  std::optional<double> budget;
  bool nonneg = false;

  bool empty() const { return !lower && !upper && !budget && !nonneg; }

  static ConstraintSet simplex(double budget = 1.0) {
    ConstraintSet cs;
    cs.nonneg = true;
    cs.budget = budget;
    return cs;
  }
  static ConstraintSet long_only() {
    ConstraintSet cs;
    cs.nonneg = true;
    return cs;
  }
};

enum class SolveStatus { Converged, MaxIter, Infeasible, DomainBreach };

struct SolveReport {
  int iterations = 0;
  double grad_norm = 0.0;  // scaled (projected) gradient norm at exit
  double objective = 0.0;
  SolveStatus status = SolveStatus::Converged;
};

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 10000;
};

/// Smooth objective with gradient; in_domain guards open-domain terms
/// (log barriers). Leave in_domain empty for globally defined objectives.
struct Objective {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<bool(const Vec&)> in_domain;
};

/// Minimizes a smooth convex objective. Unconstrained problems use
/// L-BFGS with backtracking; constrained problems use projected gradient
/// with a Barzilai-Borwein initial step. The line search halves the step
/// on any domain breach, so iterates never leave the open domain.
std::pair<Vec, SolveReport> minimize(const Objective& f, const Vec& x0,
                                     const ConstraintSet& cs = {},
                                     const SolverOptions& opts = {});

/// Euclidean projection onto {w >= 0, sum(w) = budget} by the sorted
/// threshold algorithm. With nonneg = false, projects onto the
/// hyperplane sum(w) = budget only.
Vec project_simplex(const Vec& x, double budget, bool nonneg = true);

/// Projection onto a general ConstraintSet.
Vec project(const Vec& x, const ConstraintSet& cs);

}  // namespace portopt
