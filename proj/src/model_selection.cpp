#include "dlpd/model_selection.hpp"

#include "dlpd/classifier.hpp"
#include "dlpd/dantzig.hpp"
#include "dlpd/local_moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dlpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, msg);
}

// Partial Fisher-Yates: m distinct coordinates out of p.
std::vector<Index> draw_subset(Index p, Index m, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index k = 0; k < m; ++k) {
    const auto j = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(p - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(m));
  return idx;
}

// Gaussian leave-one-out term for one observation: r^T S^{-1} r + log|S|.
// The ridge is relative to mean(diag S), or to the raw second-moment scale
// when the centred diagonal is lost in rounding (constant features).
double gaussian_term(Matrix cov, const Vector& resid, double ridge, double raw_scale) {
  const Index m = cov.rows();
  double scale = cov.diagonal().mean();
  if (!(scale > 1e-10 * raw_scale)) scale = raw_scale > 0.0 ? raw_scale : 1.0;
  cov.diagonal().array() += ridge * scale;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return kInf;
  const Vector w = llt.matrixL().solve(resid);
  double logdet = 0.0;
  for (Index a = 0; a < m; ++a) logdet += 2.0 * std::log(llt.matrixLLT()(a, a));
  return w.squaredNorm() + logdet;
}

}  // namespace

Index BandwidthCvConfig::resolved_subset_dim(Index n1, Index n2, Index p) const {
  if (subset_dim > 0) return subset_dim;
  return std::min<Index>({10, std::min(n1, n2) / 4, p});
}

void BandwidthCvConfig::validate(Index n1, Index n2, Index p) const {
  const Index m = resolved_subset_dim(n1, n2, p);
  require(replications >= 1, "bandwidth CV: N must be >= 1");
  require(m >= 1 && m <= p, "bandwidth CV: subset dimension m must be in [1, p]");
  require(m < std::min(n1, n2), "bandwidth CV: subset dimension m must be < min(n1, n2)");
  require(!grid.empty(), "bandwidth CV: empty grid");
  for (double g : grid) require(g > 0.0 && std::isfinite(g), "bandwidth CV: multipliers must be > 0");
  require(ridge >= 0.0, "bandwidth CV: ridge must be >= 0");
}

double cv_bandwidth_score(const DataSet& data, ClassLabel label, const Bandwidth& h,
                          const KernelSpec& kernel, const BandwidthCvConfig& cfg, Rng& rng) {
  const Index n1 = data.count(ClassLabel::X);
  const Index n2 = data.count(ClassLabel::Y);
  const Index p = data.feature_dim();
  cfg.validate(n1, n2, p);
  const Index m = cfg.resolved_subset_dim(n1, n2, p);

  const Matrix& x = data.class_features(label);
  const Matrix& u = data.class_covariates(label);
  const Index n = x.rows();

  // Row-normalized leave-one-out weights.
  Matrix w(n, n);
#pragma omp parallel for schedule(static) if (n > 256)
  for (Index i = 0; i < n; ++i) {
    w.row(i) = kernel_weights(u, u.row(i).transpose(), h, kernel).transpose();
    w(i, i) = 0.0;
  }
  const Vector totals = w.rowwise().sum();
  if (!(totals.minCoeff() > kWeightFloor)) {
    // Still consume the subsets so callers see the same stream either way.
    for (Index r = 0; r < cfg.replications; ++r) draw_subset(p, m, rng);
    return kInf;
  }
  const Matrix weights = totals.cwiseInverse().asDiagonal() * w;

  double total = 0.0;
  for (Index r = 0; r < cfg.replications; ++r) {
    const std::vector<Index> subset = draw_subset(p, m, rng);
    Matrix xr(n, m);
    for (Index a = 0; a < m; ++a) xr.col(a) = x.col(subset[static_cast<std::size_t>(a)]);

    // Leave-one-out first and second moments for every i at once.
    Matrix products(n, m * m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) products.col(a * m + b) = xr.col(a).cwiseProduct(xr.col(b));
    const Matrix means = weights * xr;
    const Matrix second = weights * products;

    std::vector<double> terms(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (n * m * m > 20000)
    for (Index i = 0; i < n; ++i) {
      const Vector mean = means.row(i).transpose();
      Matrix cov = Eigen::Map<const Matrix>(second.row(i).eval().data(), m, m) - mean * mean.transpose();
      cov = 0.5 * (cov + cov.transpose()).eval();
      const Vector resid = xr.row(i).transpose() - mean;
      double raw_scale = 0.0;
      for (Index a = 0; a < m; ++a) raw_scale += second(i, a * m + a);
      raw_scale /= static_cast<double>(m);
      double term = gaussian_term(cov, resid, cfg.ridge, raw_scale);
      if (!std::isfinite(term)) {
        // Cancellation in the uncentred form; recompute from centred rows.
        const Matrix centred = xr.rowwise() - mean.transpose();
        const Matrix direct = centred.transpose() * weights.row(i).transpose().asDiagonal() * centred;
        term = gaussian_term(direct, resid, cfg.ridge, raw_scale);
      }
      terms[static_cast<std::size_t>(i)] = term;
    }
    double sum = 0.0;
    for (double t : terms) sum += t;
    total += sum / static_cast<double>(n);
  }
  return total / static_cast<double>(cfg.replications);
}

namespace {

Bandwidth grid_centre(const DataSet& data, ClassLabel label, const BandwidthCvConfig& cfg) {
  if (cfg.base) {
    require(cfg.base->dim() == data.covariate_dim(), "bandwidth CV: base has wrong dimension");
    return *cfg.base;
  }
  return rate_bandwidth(std::max<Index>(2, data.count(label)), data.feature_dim(),
                        data.covariate_dim(), 1.0);
}

std::vector<double> grid_scores(const DataSet& data, ClassLabel label, const KernelSpec& kernel,
                                const BandwidthCvConfig& cfg, const Rng& rng) {
  const Bandwidth centre = grid_centre(data, label, cfg);
  std::vector<double> scores(cfg.grid.size());
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    Rng local = rng;  // common subsets across candidates
    scores[g] = cv_bandwidth_score(data, label, centre.scaled(cfg.grid[g]), kernel, cfg, local);
  }
  return scores;
}

std::size_t argmin_smaller_multiplier(const std::vector<double>& grid,
                                      const std::vector<double>& scores) {
  std::size_t best = grid.size();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!std::isfinite(scores[g])) continue;
    if (best == grid.size() || scores[g] < scores[best] ||
        (scores[g] == scores[best] && grid[g] < grid[best])) {
      best = g;
    }
  }
  if (best == grid.size()) {
    throw Error(ErrorKind::AllWindowsEmpty,
                "bandwidth CV: every candidate leaves some observation with an empty window");
  }
  return best;
}

}  // namespace

BandwidthSelection select_bandwidth(const DataSet& data, ClassLabel label,
                                    const KernelSpec& kernel, const BandwidthCvConfig& cfg,
                                    Rng& rng) {
  std::vector<double> scores = grid_scores(data, label, kernel, cfg, rng);
  rng.next_u64();
  const std::size_t best = argmin_smaller_multiplier(cfg.grid, scores);
  return {grid_centre(data, label, cfg).scaled(cfg.grid[best]), cfg.grid[best], std::move(scores)};
}

std::pair<BandwidthSelection, BandwidthSelection> select_tied_bandwidths(
    const DataSet& data, const KernelSpec& kernel, const BandwidthCvConfig& cfg, Rng& rng) {
  Rng rx = rng.fork(1);
  Rng ry = rng.fork(2);
  rng.next_u64();
  std::vector<double> sx = grid_scores(data, ClassLabel::X, kernel, cfg, rx);
  std::vector<double> sy = grid_scores(data, ClassLabel::Y, kernel, cfg, ry);
  std::vector<double> sum(sx.size());
  for (std::size_t g = 0; g < sx.size(); ++g) sum[g] = sx[g] + sy[g];
  const std::size_t best = argmin_smaller_multiplier(cfg.grid, sum);
  const double mult = cfg.grid[best];
  return {BandwidthSelection{grid_centre(data, ClassLabel::X, cfg).scaled(mult), mult, std::move(sx)},
          BandwidthSelection{grid_centre(data, ClassLabel::Y, cfg).scaled(mult), mult, std::move(sy)}};
}

std::vector<Index> stratified_folds(const DataSet& data, Index folds, RngSeed seed) {
  require(folds >= 2, "lambda CV: need K >= 2 folds");
  std::vector<Index> fold(static_cast<std::size_t>(data.size()), -1);
  Rng rng(seed);
  for (ClassLabel c : {ClassLabel::X, ClassLabel::Y}) {
    std::vector<Index> rows = data.class_rows(c);
    if (static_cast<Index>(rows.size()) < folds) {
      std::ostringstream os;
      os << "lambda CV: class " << to_string(c) << " has " << rows.size() << " samples, fewer than K = "
         << folds;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    for (std::size_t k = rows.size(); k > 1; --k) {
      std::swap(rows[k - 1], rows[static_cast<std::size_t>(rng.below(k))]);
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      fold[static_cast<std::size_t>(rows[k])] = static_cast<Index>(k) % folds;
    }
  }
  return fold;
}

namespace {

double regularized_mahalanobis(const Matrix& sigma, const Vector& delta, Index n, Index p) {
  const double tau = std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) /
                               static_cast<double>(n)) *
                     std::max(sigma.diagonal().mean(), 1e-12);
  Matrix reg = sigma;
  reg.diagonal().array() += tau;
  const Eigen::LDLT<Matrix> ldlt(reg);
  return std::sqrt(std::max(0.0, delta.dot(ldlt.solve(delta))));
}

}  // namespace

double estimate_delta_sup(const DataSet& data, const Bandwidth& hx, const Bandwidth& hy,
                          const KernelSpec& kernel) {
  const Index n = data.size();
  const Index probes = std::min<Index>(11, n);
  double best = 0.0;
  for (Index k = 0; k < probes; ++k) {
    const Index row = probes == 1 ? 0 : k * (n - 1) / (probes - 1);
    try {
      const LocalMoments lm = pooled_local_moments(
          data, CovariatePoint(Vector(data.covariates().row(row).transpose())), hx, hy, kernel);
      best = std::max(best, regularized_mahalanobis(lm.sigma_hat, lm.delta_hat(), n,
                                                    data.feature_dim()));
    } catch (const EmptyWindow&) {
    }
  }
  if (!(best > 0.0)) best = estimate_static_delta(data);
  return best;
}

double estimate_static_delta(const DataSet& data) {
  const Vector wx = Vector::Ones(data.count(ClassLabel::X));
  const Vector wy = Vector::Ones(data.count(ClassLabel::Y));
  const ClassMoments mx = weighted_moments(data.class_features(ClassLabel::X), wx, ClassLabel::X);
  const ClassMoments my = weighted_moments(data.class_features(ClassLabel::Y), wy, ClassLabel::Y);
  const double n = static_cast<double>(data.size());
  const Matrix sigma = (static_cast<double>(wx.size()) / n) * mx.covariance +
                       (static_cast<double>(wy.size()) / n) * my.covariance;
  const double d = regularized_mahalanobis(sigma, mx.mean - my.mean, data.size(), data.feature_dim());
  return d > 0.0 ? d : 1.0;
}

std::vector<double> rate_lambda_grid(const DataSet& data, Index rate_dim, double delta_sup,
                                     const std::vector<double>& multipliers) {
  require(!multipliers.empty(), "lambda CV: empty multiplier list");
  std::vector<double> grid;
  for (double c : multipliers) {
    grid.push_back(lambda_rate(static_cast<double>(data.size()),
                               static_cast<double>(std::max<Index>(2, data.feature_dim())),
                               rate_dim, delta_sup, c));
  }
  return grid;
}

std::size_t best_lambda_index(const std::vector<double>& grid, const std::vector<double>& scores) {
  require(!grid.empty() && grid.size() == scores.size(), "lambda CV: grid/score size mismatch");
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (scores[g] > scores[best] || (scores[g] == scores[best] && grid[g] > grid[best])) best = g;
  }
  return best;
}

std::vector<double> lambda_cv_scores(const DataSet& data, const Bandwidth& hx,
                                     const Bandwidth& hy, const KernelSpec& kernel,
                                     const std::vector<double>& grid, Index folds,
                                     RngSeed fold_seed) {
  require(!grid.empty(), "lambda CV: empty grid");
  for (double l : grid) require(l >= 0.0 && std::isfinite(l), "lambda CV: candidates must be >= 0");
  const std::vector<Index> fold = stratified_folds(data, folds, fold_seed);
  const std::size_t g = grid.size();
  std::vector<double> correct(g, 0.0);

  for (Index k = 0; k < folds; ++k) {
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
    for (Index i = 0; i < data.size(); ++i) {
      (fold[static_cast<std::size_t>(i)] == k ? test_rows : train_rows).push_back(i);
    }
    const DataSet train = data.subset(train_rows);
    const auto nt = static_cast<Index>(test_rows.size());
    // hits(t, j): test point t classified correctly at grid[j].
    std::vector<unsigned char> hits(static_cast<std::size_t>(nt) * g, 0);
#pragma omp parallel for schedule(dynamic)
    for (Index t = 0; t < nt; ++t) {
      const Index row = test_rows[static_cast<std::size_t>(t)];
      const CovariatePoint u(Vector(data.covariates().row(row).transpose()));
      LocalMoments lm;
      try {
        lm = pooled_local_moments(train, u, hx, hy, kernel);
      } catch (const EmptyWindow&) {
        continue;  // counts as an error for every lambda
      }
      const Vector delta = lm.delta_hat();
      const Vector z = data.features().row(row).transpose();
      for (std::size_t j = 0; j < g; ++j) {
        const DantzigSolution sol = solve_dantzig({lm.sigma_hat, delta, grid[j]});
        if (!sol.optimal()) continue;
        const ClassLabel predicted =
            decide(discriminant_score(z, lm.mu_x_hat, lm.mu_y_hat, sol.beta_hat));
        hits[static_cast<std::size_t>(t) * g + j] = predicted == data.label(row) ? 1 : 0;
      }
    }
    for (Index t = 0; t < nt; ++t)
      for (std::size_t j = 0; j < g; ++j) correct[j] += hits[static_cast<std::size_t>(t) * g + j];
  }
  for (double& c : correct) c /= static_cast<double>(folds);
  return correct;
}

LambdaSelection select_lambda(const DataSet& data, const Bandwidth& hx, const Bandwidth& hy,
                              const KernelSpec& kernel, const LambdaCvConfig& cfg) {
  LambdaSelection out;
  out.grid = cfg.grid.empty()
                 ? rate_lambda_grid(data, data.covariate_dim(),
                                    estimate_delta_sup(data, hx, hy, kernel), cfg.rate_multipliers)
                 : cfg.grid;
  out.cv_scores = lambda_cv_scores(data, hx, hy, kernel, out.grid, cfg.folds, cfg.fold_seed);
  out.lambda = out.grid[best_lambda_index(out.grid, out.cv_scores)];
  return out;
}

TuningResult tune_dlpd(const DataSet& data, const KernelSpec& kernel, const TuningConfig& cfg) {
  Rng rng(cfg.seed);
  auto centre = [&](ClassLabel c) {
    if (cfg.bandwidth.base) return *cfg.bandwidth.base;
    return rate_bandwidth(std::max<Index>(2, data.count(c)), data.feature_dim(),
                          data.covariate_dim(), 1.0);
  };

  std::optional<TuningResult> result;
  if (cfg.joint && !cfg.fixed_multiplier) {
    // Grid over (multiplier, lambda), maximising CV(lambda).
    double best_score = -1.0;
    for (double mult : cfg.bandwidth.grid) {
      const Bandwidth hx = centre(ClassLabel::X).scaled(mult);
      const Bandwidth hy = centre(ClassLabel::Y).scaled(mult);
      LambdaSelection sel;
      try {
        sel = select_lambda(data, hx, hy, kernel, cfg.lambda);
      } catch (const EmptyWindow&) {
        continue;
      }
      const std::size_t j = best_lambda_index(sel.grid, sel.cv_scores);
      if (sel.cv_scores[j] > best_score) {
        best_score = sel.cv_scores[j];
        result = TuningResult{hx, hy, sel.lambda, mult, mult, {}, {}, sel.grid, sel.cv_scores};
      }
    }
    if (!result) throw Error(ErrorKind::AllWindowsEmpty, "joint CV: no usable bandwidth");
    if (cfg.fixed_lambda) result->lambda = *cfg.fixed_lambda;
    return *result;
  }

  BandwidthSelection bx{centre(ClassLabel::X), 1.0, {}};
  BandwidthSelection by{centre(ClassLabel::Y), 1.0, {}};
  if (cfg.fixed_multiplier) {
    bx = {centre(ClassLabel::X).scaled(*cfg.fixed_multiplier), *cfg.fixed_multiplier, {}};
    by = {centre(ClassLabel::Y).scaled(*cfg.fixed_multiplier), *cfg.fixed_multiplier, {}};
  } else if (cfg.tie_bandwidths) {
    std::tie(bx, by) = select_tied_bandwidths(data, kernel, cfg.bandwidth, rng);
  } else {
    Rng rx = rng.fork(1);
    Rng ry = rng.fork(2);
    bx = select_bandwidth(data, ClassLabel::X, kernel, cfg.bandwidth, rx);
    by = select_bandwidth(data, ClassLabel::Y, kernel, cfg.bandwidth, ry);
  }

  TuningResult out{bx.bandwidth, by.bandwidth, 0.0, bx.multiplier, by.multiplier,
                   bx.scores,    by.scores,    {},  {}};
  if (cfg.fixed_lambda) {
    out.lambda = *cfg.fixed_lambda;
    return out;
  }
  const LambdaSelection sel = select_lambda(data, out.hx, out.hy, kernel, cfg.lambda);
  out.lambda = sel.lambda;
  out.lambda_grid = sel.grid;
  out.lambda_scores = sel.cv_scores;
  return out;
}

}  // namespace dlpd
