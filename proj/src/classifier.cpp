#include "dlpd/classifier.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <vector>

namespace dlpd {

double discriminant_score(const Vector& z, const Vector& mu_x, const Vector& mu_y,
                          const Vector& beta) {
  return (z - 0.5 * (mu_x + mu_y)).dot(beta);
}

// --- DlpdModel ---------------------------------------------------------------

DlpdModel::DlpdModel(DataSet training, Bandwidth hx, Bandwidth hy, KernelSpec kernel,
                     double lambda, bool use_cache)
    : training_(std::move(training)),
      hx_(std::move(hx)),
      hy_(std::move(hy)),
      kernel_(kernel),
      lambda_(lambda),
      cache_(use_cache ? std::make_unique<Cache>() : nullptr) {
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw Error(ErrorKind::InvalidArgument, "DlpdModel: lambda must be finite and >= 0");
  }
  if (hx_.dim() != training_.covariate_dim() || hy_.dim() != training_.covariate_dim()) {
    throw Error(ErrorKind::InvalidArgument, "DlpdModel: bandwidth dimension != covariate dimension");
  }
  if (training_.count(ClassLabel::X) < 1 || training_.count(ClassLabel::Y) < 1) {
    throw Error(ErrorKind::InvalidArgument, "DlpdModel: both classes need training samples");
  }
}

std::shared_ptr<const LocalFit> DlpdModel::compute(const CovariatePoint& u) const {
  auto fit = std::make_shared<LocalFit>();
  fit->moments = pooled_local_moments(training_, u, hx_, hy_, kernel_);
  fit->solution = solve_dantzig({fit->moments.sigma_hat, fit->moments.delta_hat(), lambda_});
  return fit;
}

std::shared_ptr<const LocalFit> DlpdModel::local_fit(const CovariatePoint& u) const {
  if (u.dim() != training_.covariate_dim()) {
    throw Error(ErrorKind::InvalidArgument, "covariate point has the wrong dimension");
  }
  if (!cache_) return compute(u);

  CacheKey key(static_cast<std::size_t>(u.dim()));
  for (Index i = 0; i < u.dim(); ++i) {
    key[static_cast<std::size_t>(i)] = std::llround(u[i] * 1e9);
  }
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->entries.find(key); it != cache_->entries.end()) return it->second;
  }
  auto fit = compute(u);
  std::lock_guard lock(cache_->mutex);
  return cache_->entries.emplace(std::move(key), std::move(fit)).first->second;
}

double DlpdModel::score(const Vector& z, const CovariatePoint& u) const {
  if (z.size() != training_.feature_dim()) {
    throw Error(ErrorKind::InvalidArgument, "feature vector has the wrong dimension");
  }
  const auto fit = local_fit(u);
  if (!fit->solution.optimal()) {
    std::ostringstream os;
    os << "Dantzig LP at u = (" << u.coords().transpose() << ") failed: " << fit->solution.diagnostic;
    throw Error(ErrorKind::Infeasible, os.str());
  }
  return discriminant_score(z, fit->moments.mu_x_hat, fit->moments.mu_y_hat,
                            fit->solution.beta_hat);
}

Vector DlpdModel::beta_hat(const CovariatePoint& u) const {
  const auto fit = local_fit(u);
  if (!fit->solution.optimal()) {
    throw Error(ErrorKind::Infeasible, "Dantzig LP failed: " + fit->solution.diagnostic);
  }
  return fit->solution.beta_hat;
}

std::size_t DlpdModel::cache_size() const {
  if (!cache_) return 0;
  std::lock_guard lock(cache_->mutex);
  return cache_->entries.size();
}

ClassLabel dlpd_classify(const DlpdModel& model, const Vector& z, const CovariatePoint& u) {
  return decide(model.score(z, u));
}

std::vector<Prediction> predict_batch(const DlpdModel& model, const Matrix& features,
                                      const Matrix& covariates) {
  if (features.rows() != covariates.rows()) {
    throw Error(ErrorKind::InvalidArgument, "predict_batch: row counts differ");
  }
  const Index n = features.rows();
  std::vector<Prediction> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    Prediction& pr = out[static_cast<std::size_t>(i)];
    try {
      const CovariatePoint u(Vector(covariates.row(i).transpose()));
      const auto fit = model.local_fit(u);
      if (!fit->solution.optimal()) {
        pr.status = PredictionStatus::Infeasible;
        continue;
      }
      pr.score = discriminant_score(features.row(i).transpose(), fit->moments.mu_x_hat,
                                    fit->moments.mu_y_hat, fit->solution.beta_hat);
      pr.label = decide(pr.score);
      pr.zero_direction = fit->solution.beta_hat.isZero(0.0);
    } catch (const EmptyWindow&) {
      pr.status = PredictionStatus::EmptyWindow;
    }
  }
  return out;
}

// --- Oracle --------------------------------------------------------------------

OracleModel::OracleModel(Index p, Index d, MeanFn mu_x, MeanFn mu_y, CovarianceFn sigma,
                         DeltaSqFn delta_sq)
    : p_(p),
      d_(d),
      mu_x_(std::move(mu_x)),
      mu_y_(std::move(mu_y)),
      sigma_(std::move(sigma)),
      delta_sq_(std::move(delta_sq)) {
  if (p_ < 1 || d_ < 1) throw Error(ErrorKind::InvalidArgument, "OracleModel: p, d must be >= 1");
}

Eigen::LLT<Matrix> spd_factor(const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
  }
  const Vector pivots = llt.matrixLLT().diagonal().array().square();
  if (pivots.minCoeff() <= 1e-12 * pivots.maxCoeff()) {
    throw Error(ErrorKind::SingularCovariance, "covariance is numerically singular");
  }
  return llt;
}

Vector bayes_direction(const OracleModel& oracle, const CovariatePoint& u) {
  const auto llt = spd_factor(oracle.sigma(u));
  return llt.solve(oracle.mu_x(u) - oracle.mu_y(u));
}

ClassLabel bayes_classify(const OracleModel& oracle, const Vector& z, const CovariatePoint& u) {
  const Vector beta = bayes_direction(oracle, u);
  return decide(discriminant_score(z, oracle.mu_x(u), oracle.mu_y(u), beta));
}

double mahalanobis_delta(const OracleModel& oracle, const CovariatePoint& u) {
  if (oracle.has_closed_form_delta()) return std::sqrt(std::max(0.0, oracle.closed_form_delta_sq(u)));
  return mahalanobis_delta_cholesky(oracle, u);
}

double mahalanobis_delta_cholesky(const OracleModel& oracle, const CovariatePoint& u) {
  const auto llt = spd_factor(oracle.sigma(u));
  const Vector w = llt.matrixL().solve(oracle.mu_x(u) - oracle.mu_y(u));
  return w.norm();
}

double bayes_conditional_risk(const OracleModel& oracle, const CovariatePoint& u) {
  return std_normal_cdf(-0.5 * mahalanobis_delta(oracle, u));
}

namespace {

ExpectedRisk monte_carlo_risk(const OracleModel& oracle, const RiskIntegration& how) {
  const Index d = oracle.covariate_dim();
  Rng rng(how.seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  Vector u(d);
  for (std::size_t k = 0; k < how.mc_draws; ++k) {
    for (Index i = 0; i < d; ++i) u[i] = rng.uniform();
    const double r = bayes_conditional_risk(oracle, CovariatePoint(u));
    sum += r;
    sum_sq += r * r;
  }
  const double n = static_cast<double>(how.mc_draws);
  ExpectedRisk out;
  out.method = IntegrationMethod::MonteCarlo;
  out.value = sum / n;
  out.standard_error = n > 1 ? std::sqrt(std::max(0.0, (sum_sq / n - out.value * out.value)) / (n - 1)) : 0.0;
  out.evaluations = how.mc_draws;
  return out;
}

}  // namespace

ExpectedRisk bayes_expected_risk(const OracleModel& oracle, const RiskIntegration& how) {
  using boost::math::quadrature::gauss_kronrod;
  const Index d = oracle.covariate_dim();
  if (how.method == IntegrationMethod::MonteCarlo || d > 2) {
    if (how.mc_draws < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 Monte Carlo draws");
    return monte_carlo_risk(oracle, how);
  }
  ExpectedRisk out;
  out.method = IntegrationMethod::Quadrature;
  double err = 0.0;
  if (d == 1) {
    auto f = [&](double u) {
      ++out.evaluations;
      return bayes_conditional_risk(oracle, CovariatePoint{u});
    };
    out.value = gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 20, how.tolerance, &err);
    out.error_estimate = err;
    return out;
  }
  // d == 2: nested fixed K31 panels that shrink geometrically toward the
  // corner (0, 0) and meet at the diagonal u2 = u1. Covariances may degenerate
  // on the edges of the square with boundary layers whose width is
  // proportional to the distance from the corner, so each panel sees a smooth
  // integrand on its own scale. Inner cuts move continuously with u1, which
  // keeps the outer integrand smooth. Strips closer than 2^-kOctaves * u to an
  // edge are dropped; the integrand is at most 1/2. The error estimate is the
  // change against half the panel density plus the dropped strips.
  constexpr int kOctaves = 30;
  const double corner_gap = std::ldexp(1.0, -kOctaves);
  using Rule = gauss_kronrod<double, 31>;

  auto integrate = [&](int per_octave) {
    const int panels = kOctaves * per_octave;
    const double down = std::exp2(-1.0 / per_octave);
    auto outer = [&](double u1) {
      auto inner = [&](double u2) {
        ++out.evaluations;
        return bayes_conditional_risk(oracle, CovariatePoint{u1, u2});
      };
      double v = 0.0;
      double b = u1;
      for (int k = 0; k < panels; ++k) {
        v += Rule::integrate(inner, b * down, b, 0);
        b *= down;
      }
      const int n = panels / 2;
      const double up = std::pow(1.0 / u1, 1.0 / n);
      double lo = u1;
      for (int k = 1; k <= n && u1 < 1.0; ++k) {
        const double hi = k == n ? 1.0 : lo * up;
        v += Rule::integrate(inner, lo, hi, 0);
        lo = hi;
      }
      return v;
    };
    double v = 0.0;
    double hi = 1.0;
    for (int k = 0; k < panels; ++k) {
      v += Rule::integrate(outer, hi * down, hi, 0);
      hi *= down;
    }
    return v;
  };

  out.value = integrate(4);
  out.error_estimate = std::abs(out.value - integrate(2)) + 2.0 * corner_gap;
  return out;
}

PlugInRisk dlpd_conditional_risk(const Vector& mu_x_hat, const Vector& mu_y_hat,
                                 const Vector& beta_hat, const OracleModel& oracle,
                                 const CovariatePoint& u) {
  const Matrix sigma = oracle.sigma(u);
  spd_factor(sigma);
  const double quad = beta_hat.dot(sigma * beta_hat);
  if (quad <= 1e-14) return {0.5, true};
  const double s = std::sqrt(quad);
  const double centre = (mu_x_hat - mu_y_hat).dot(beta_hat) / (2.0 * s);
  const double shift_y = (mu_y_hat - oracle.mu_y(u)).dot(beta_hat) / s;
  const double shift_x = (mu_x_hat - oracle.mu_x(u)).dot(beta_hat) / s;
  return {0.5 * std_normal_cdf(-centre - shift_y) + 0.5 * std_normal_cdf(-centre + shift_x), false};
}

}  // namespace dlpd
