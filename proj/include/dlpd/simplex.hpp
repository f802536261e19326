#pragma once

#include "dlpd/core.hpp"

#include <string>
#include <vector>

namespace dlpd {

/// minimize cost^T x  subject to  constraints * x <= bounds,
/// x_j >= 0 unless free_variable[j].
struct LinearProgram {
  Vector cost;
  Matrix constraints;
  Vector bounds;
  std::vector<bool> free_variable;

  Index num_variables() const noexcept { return cost.size(); }
  Index num_constraints() const noexcept { return constraints.rows(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus s);

struct SimplexOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-11;
  Index max_pivots = 10000;
  // Switch from largest-coefficient pricing to Bland's rule once this many
  // degenerate pivots have been taken.
  Index bland_after_degenerate = 1000;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  Index iterations = 0;
  Index degenerate_pivots = 0;
  bool used_bland = false;
  std::string diagnostic;
};

/// Dense two-phase primal simplex. Free variables are split into positive and
/// negative parts; rows with negative right-hand side get an artificial
/// variable for phase 1. The final basic solution is recomputed from the
/// original data with an LU solve of the optimal basis.
LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace dlpd
