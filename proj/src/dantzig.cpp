#include "dlpd/dantzig.hpp"

#include <cmath>
#include <sstream>

namespace dlpd {

void DantzigProblem::validate() const {
  const Index p = delta_hat.size();
  if (p < 1 || sigma_hat.rows() != p || sigma_hat.cols() != p) {
    throw Error(ErrorKind::InvalidArgument, "DantzigProblem: dimension mismatch");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidArgument, "DantzigProblem: lambda must be finite and >= 0");
  }
  if (!sigma_hat.allFinite() || !delta_hat.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "DantzigProblem: non-finite entries");
  }
  const double asym = (sigma_hat - sigma_hat.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, sigma_hat.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::InvalidArgument, "DantzigProblem: sigma_hat is not symmetric");
  }
}

LinearProgram build_lp(const DantzigProblem& problem) {
  problem.validate();
  const Index p = problem.dim();
  LinearProgram lp;
  lp.cost = Vector::Zero(2 * p);
  lp.cost.tail(p).setOnes();
  lp.constraints = Matrix::Zero(4 * p, 2 * p);
  lp.bounds = Vector::Zero(4 * p);
  lp.free_variable.assign(static_cast<std::size_t>(2 * p), false);
  for (Index i = 0; i < p; ++i) {
    lp.free_variable[static_cast<std::size_t>(i)] = true;

    lp.constraints(i, i) = 1.0;
    lp.constraints(i, p + i) = -1.0;

    lp.constraints(p + i, i) = -1.0;
    lp.constraints(p + i, p + i) = -1.0;

    lp.constraints.row(2 * p + i).head(p) = problem.sigma_hat.row(i);
    lp.bounds[2 * p + i] = problem.lambda + problem.delta_hat[i];

    lp.constraints.row(3 * p + i).head(p) = -problem.sigma_hat.row(i);
    lp.bounds[3 * p + i] = problem.lambda - problem.delta_hat[i];
  }
  return lp;
}

DantzigSolution solve_dantzig(const DantzigProblem& problem) {
  const LinearProgram lp = build_lp(problem);
  const Index p = problem.dim();

  SimplexOptions opt;
  opt.feas_tol = kDantzigFeasTol;
  opt.opt_tol = kDantzigOptTol;
  opt.max_pivots = 50 * p;
  opt.bland_after_degenerate = 10 * p;
  const LpResult r = solve_lp(lp, opt);

  DantzigSolution sol;
  sol.iterations = r.iterations;
  if (r.status != LpStatus::Optimal) {
    sol.status = DantzigStatus::Infeasible;
    sol.beta_hat = Vector::Zero(p);
    sol.diagnostic = std::string(to_string(r.status)) + ": " + r.diagnostic;
    sol.residual_inf_norm = problem.delta_hat.cwiseAbs().maxCoeff();
    return sol;
  }
  sol.beta_hat = r.x.head(p);
  sol.objective = sol.beta_hat.lpNorm<1>();
  sol.residual_inf_norm =
      (problem.sigma_hat * sol.beta_hat - problem.delta_hat).cwiseAbs().maxCoeff();
  if (sol.residual_inf_norm > problem.lambda + kDantzigFeasTol) {
    std::ostringstream os;
    os << "simplex basis violates the residual bound: " << sol.residual_inf_norm << " > "
       << problem.lambda;
    sol.status = DantzigStatus::Infeasible;
    sol.diagnostic = os.str();
    return sol;
  }
  sol.status = DantzigStatus::Optimal;
  return sol;
}

double lambda_rate(double n, double p, Index d, double delta_sup, double c) {
  if (!(n >= 2.0) || !(p >= 2.0) || d < 0 || !(delta_sup > 0.0) || !(c > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "lambda_rate: need n>=2, p>=2, d>=0, delta_sup>0, C>0");
  }
  return c * std::pow(std::log(p) / n, 2.0 / (4.0 + static_cast<double>(d))) * delta_sup;
}

}  // namespace dlpd
