#pragma once

#include "dlpd/core.hpp"
#include "dlpd/dantzig.hpp"
#include "dlpd/kernels.hpp"
#include "dlpd/local_moments.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace dlpd {

// {z - (mu_x + mu_y)/2}^T beta
double discriminant_score(const Vector& z, const Vector& mu_x, const Vector& mu_y,
                          const Vector& beta);

// score >= 0 -> X, otherwise Y.
inline ClassLabel decide(double score) { return score >= 0.0 ? ClassLabel::X : ClassLabel::Y; }

struct LocalFit {
  LocalMoments moments;
  DantzigSolution solution;
};

/// Fitted DLPD rule: training data, bandwidths, kernel and lambda. Local
/// estimates are computed on demand per covariate point and memoized on a
/// 1e-9 grid; the memo is mutex-guarded so a model can be queried from
/// several threads.
class DlpdModel {
 public:
  DlpdModel(DataSet training, Bandwidth hx, Bandwidth hy, KernelSpec kernel, double lambda,
            bool use_cache = true);

  const DataSet& training() const noexcept { return training_; }
  const Bandwidth& hx() const noexcept { return hx_; }
  const Bandwidth& hy() const noexcept { return hy_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  double lambda() const noexcept { return lambda_; }

  // Throws EmptyWindow; an infeasible LP is returned in the solution status.
  std::shared_ptr<const LocalFit> local_fit(const CovariatePoint& u) const;

  // Throws EmptyWindow, or Error(Infeasible) when the LP at u has no solution.
  double score(const Vector& z, const CovariatePoint& u) const;
  Vector beta_hat(const CovariatePoint& u) const;

  std::size_t cache_size() const;

 private:
  using CacheKey = std::vector<std::int64_t>;

  struct Cache {
    std::mutex mutex;
    std::map<CacheKey, std::shared_ptr<const LocalFit>> entries;
  };

  std::shared_ptr<const LocalFit> compute(const CovariatePoint& u) const;

  DataSet training_;
  Bandwidth hx_;
  Bandwidth hy_;
  KernelSpec kernel_;
  double lambda_;
  std::unique_ptr<Cache> cache_;
};

ClassLabel dlpd_classify(const DlpdModel& model, const Vector& z, const CovariatePoint& u);

enum class PredictionStatus { Ok, EmptyWindow, Infeasible };

struct Prediction {
  ClassLabel label = ClassLabel::X;
  double score = 0.0;
  PredictionStatus status = PredictionStatus::Ok;
  bool zero_direction = false;  // beta_hat == 0: everything goes to X
};

// One prediction per row; rows are classified in parallel. Failures are
// recorded per row instead of thrown.
std::vector<Prediction> predict_batch(const DlpdModel& model, const Matrix& features,
                                      const Matrix& covariates);

/// True model: mu_X(u), mu_Y(u), Sigma(u).
class OracleModel {
 public:
  using MeanFn = std::function<Vector(const CovariatePoint&)>;
  using CovarianceFn = std::function<Matrix(const CovariatePoint&)>;
  // Optional closed form of Delta_p(u)^2 for structured covariances. Must
  // throw SingularCovariance where the generic check would.
  using DeltaSqFn = std::function<double(const CovariatePoint&)>;

  OracleModel(Index p, Index d, MeanFn mu_x, MeanFn mu_y, CovarianceFn sigma,
              DeltaSqFn delta_sq = {});

  Index feature_dim() const noexcept { return p_; }
  Index covariate_dim() const noexcept { return d_; }
  Vector mu_x(const CovariatePoint& u) const { return mu_x_(u); }
  Vector mu_y(const CovariatePoint& u) const { return mu_y_(u); }
  Matrix sigma(const CovariatePoint& u) const { return sigma_(u); }
  bool has_closed_form_delta() const noexcept { return static_cast<bool>(delta_sq_); }
  double closed_form_delta_sq(const CovariatePoint& u) const { return delta_sq_(u); }

 private:
  Index p_;
  Index d_;
  MeanFn mu_x_;
  MeanFn mu_y_;
  CovarianceFn sigma_;
  DeltaSqFn delta_sq_;
};

// Cholesky factor of an SPD matrix. Throws SingularCovariance when the
// factorization fails or the smallest squared pivot is <= 1e-12 times the
// largest.
Eigen::LLT<Matrix> spd_factor(const Matrix& sigma);

// Sigma^{-1}(u) [mu_X(u) - mu_Y(u)]
Vector bayes_direction(const OracleModel& oracle, const CovariatePoint& u);

ClassLabel bayes_classify(const OracleModel& oracle, const Vector& z, const CovariatePoint& u);

// Uses the oracle's closed form when present, a Cholesky solve otherwise.
double mahalanobis_delta(const OracleModel& oracle, const CovariatePoint& u);
double mahalanobis_delta_cholesky(const OracleModel& oracle, const CovariatePoint& u);

// Phi(-Delta_p(u) / 2)
double bayes_conditional_risk(const OracleModel& oracle, const CovariatePoint& u);

enum class IntegrationMethod { Quadrature, MonteCarlo };

/// How to take E_U over U ~ Uniform[0,1]^d.
struct RiskIntegration {
  IntegrationMethod method = IntegrationMethod::Quadrature;
  // Relative tolerance of the d = 1 adaptive rule; risks are at most 1/2, so
  // it also bounds the absolute error. The d = 2 rule uses fixed panels.
  double tolerance = 1e-6;
  std::size_t mc_draws = 100000;
  RngSeed seed{20170101};
};

struct ExpectedRisk {
  double value = 0.0;
  double standard_error = 0.0;  // Monte Carlo only
  double error_estimate = 0.0;  // quadrature only, absolute
  std::size_t evaluations = 0;
  IntegrationMethod method = IntegrationMethod::Quadrature;
};

// Adaptive Gauss-Kronrod for d = 1, nested fixed-panel Gauss-Kronrod for
// d = 2, Monte Carlo otherwise or on request.
ExpectedRisk bayes_expected_risk(const OracleModel& oracle, const RiskIntegration& how = {});

struct PlugInRisk {
  double risk = 0.5;
  bool degenerate_direction = false;  // beta^T Sigma beta <= 1e-14; risk is 0.5
};

// Conditional misclassification rate of the plug-in rule built from
// (mu_x_hat, mu_y_hat, beta_hat) under the true model at u.
PlugInRisk dlpd_conditional_risk(const Vector& mu_x_hat, const Vector& mu_y_hat,
                                 const Vector& beta_hat, const OracleModel& oracle,
                                 const CovariatePoint& u);

}  // namespace dlpd
