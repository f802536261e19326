#pragma once

#include "dlpd/core.hpp"
#include "dlpd/simplex.hpp"

#include <string>

namespace dlpd {

/// min |beta|_1  s.t.  |sigma_hat * beta - delta_hat|_inf <= lambda
struct DantzigProblem {
  Matrix sigma_hat;
  Vector delta_hat;
  double lambda = 0.0;

  Index dim() const noexcept { return delta_hat.size(); }
  void validate() const;
};

enum class DantzigStatus { Optimal, Infeasible };

struct DantzigSolution {
  Vector beta_hat;
  double objective = 0.0;  // |beta_hat|_1
  DantzigStatus status = DantzigStatus::Infeasible;
  double residual_inf_norm = 0.0;
  Index iterations = 0;
  std::string diagnostic;

  bool optimal() const noexcept { return status == DantzigStatus::Optimal; }
};

inline constexpr double kDantzigFeasTol = 1e-9;
inline constexpr double kDantzigOptTol = 1e-9;

// Variables (beta_1..beta_p, v_1..v_p), beta free and v >= 0; objective
// sum(v). Rows, in order: beta_i - v_i <= 0; -beta_i - v_i <= 0;
// gamma_i^T beta <= lambda + delta_i; -gamma_i^T beta <= lambda - delta_i,
// where gamma_i^T is row i of sigma_hat.
LinearProgram build_lp(const DantzigProblem& problem);

// Two-phase simplex on build_lp(problem): largest-coefficient pricing, Bland's
// rule after 10p degenerate pivots, at most 50p pivots.
DantzigSolution solve_dantzig(const DantzigProblem& problem);

// C * (log p / n)^{2/(4+d)} * delta_sup. d = 0 gives the static rate.
double lambda_rate(double n, double p, Index d, double delta_sup, double c);

}  // namespace dlpd
