#include "dlpd/baselines.hpp"

#include "dlpd/classifier.hpp"
#include "dlpd/local_moments.hpp"
#include "dlpd/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dlpd {

StaticLpdModel::StaticLpdModel(Vector mu_x, Vector mu_y, Matrix sigma, double lambda)
    : mu_x_(std::move(mu_x)), mu_y_(std::move(mu_y)), sigma_(std::move(sigma)), lambda_(lambda) {
  solution_ = solve_dantzig({sigma_, mu_x_ - mu_y_, lambda_});
}

double StaticLpdModel::score(const Vector& z) const {
  if (!solution_.optimal()) {
    throw Error(ErrorKind::Infeasible, "static LPD: Dantzig LP failed: " + solution_.diagnostic);
  }
  if (z.size() != mu_x_.size()) {
    throw Error(ErrorKind::InvalidArgument, "static LPD: feature vector has the wrong dimension");
  }
  return discriminant_score(z, mu_x_, mu_y_, solution_.beta_hat);
}

ClassLabel StaticLpdModel::classify(const Vector& z) const { return decide(score(z)); }

StaticLpdModel static_lpd_from_data(const DataSet& data, double lambda) {
  const Index n1 = data.count(ClassLabel::X);
  const Index n2 = data.count(ClassLabel::Y);
  if (n1 < 1 || n2 < 1) throw Error(ErrorKind::InvalidArgument, "static LPD: both classes needed");
  const ClassMoments mx = weighted_moments(data.class_features(ClassLabel::X), Vector::Ones(n1),
                                           ClassLabel::X);
  const ClassMoments my = weighted_moments(data.class_features(ClassLabel::Y), Vector::Ones(n2),
                                           ClassLabel::Y);
  const double n = static_cast<double>(n1 + n2);
  Matrix sigma = (static_cast<double>(n1) / n) * mx.covariance +
                 (static_cast<double>(n2) / n) * my.covariance;
  return StaticLpdModel(mx.mean, my.mean, std::move(sigma), lambda);
}

StaticLpdFit fit_static_lpd(const DataSet& data, const StaticLpdConfig& cfg) {
  std::vector<double> grid =
      cfg.grid.empty()
          ? rate_lambda_grid(data, 0, estimate_static_delta(data), cfg.rate_multipliers)
          : cfg.grid;
  const std::vector<Index> fold = stratified_folds(data, cfg.folds, cfg.fold_seed);
  std::vector<double> correct(grid.size(), 0.0);
  for (Index k = 0; k < cfg.folds; ++k) {
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
    for (Index i = 0; i < data.size(); ++i) {
      (fold[static_cast<std::size_t>(i)] == k ? test_rows : train_rows).push_back(i);
    }
    const DataSet train = data.subset(train_rows);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const StaticLpdModel m = static_lpd_from_data(train, grid[j]);
      if (!m.solution().optimal()) continue;
      for (Index row : test_rows) {
        if (m.classify(data.features().row(row).transpose()) == data.label(row)) correct[j] += 1.0;
      }
    }
  }
  for (double& c : correct) c /= static_cast<double>(cfg.folds);
  const double lambda = grid[best_lambda_index(grid, correct)];
  return {static_lpd_from_data(data, lambda), std::move(grid), std::move(correct)};
}

namespace {

ClassLabel vote(const Vector& dist, const std::vector<ClassLabel>& labels, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(dist.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });
  Index votes_x = 0;
  for (Index i = 0; i < k; ++i) {
    if (labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] == ClassLabel::X) ++votes_x;
  }
  return 2 * votes_x >= k ? ClassLabel::X : ClassLabel::Y;
}

Matrix squared_distances(const Matrix& train, const Matrix& query) {
  // |q|^2 + |t|^2 - 2 q.t, one row per query.
  Matrix d = -2.0 * query * train.transpose();
  d.colwise() += query.rowwise().squaredNorm();
  d.rowwise() += train.rowwise().squaredNorm().transpose();
  return d;
}

}  // namespace

ClassLabel knn_classify(const DataSet& training, const Vector& z, Index k) {
  return knn_classify_batch(training, z.transpose(), k).front();
}

std::vector<ClassLabel> knn_classify_batch(const DataSet& training, const Matrix& features,
                                           Index k) {
  if (k < 1 || k > training.size()) {
    throw Error(ErrorKind::InvalidArgument, "kNN: k must be in [1, n]");
  }
  if (features.cols() != training.feature_dim()) {
    throw Error(ErrorKind::InvalidArgument, "kNN: feature vector has the wrong dimension");
  }
  const Matrix dist = squared_distances(training.features(), features);
  std::vector<ClassLabel> out(static_cast<std::size_t>(features.rows()));
#pragma omp parallel for schedule(static) if (features.rows() > 64)
  for (Index i = 0; i < features.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = vote(dist.row(i).transpose(), training.labels(), k);
  }
  return out;
}

KnnSelection select_knn_k(const DataSet& data, Index folds, RngSeed fold_seed) {
  const std::vector<Index> fold = stratified_folds(data, folds, fold_seed);
  Index smallest_train = data.size();
  for (Index k = 0; k < folds; ++k) {
    smallest_train = std::min<Index>(
        smallest_train,
        static_cast<Index>(std::count_if(fold.begin(), fold.end(), [&](Index f) { return f != k; })));
  }
  KnnSelection out;
  for (Index k = 1; k <= std::min<Index>(25, smallest_train); k += 2) out.grid.push_back(k);
  out.cv_scores.assign(out.grid.size(), 0.0);
  for (Index k = 0; k < folds; ++k) {
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
    for (Index i = 0; i < data.size(); ++i) {
      (fold[static_cast<std::size_t>(i)] == k ? test_rows : train_rows).push_back(i);
    }
    const DataSet train = data.subset(train_rows);
    Matrix query(static_cast<Index>(test_rows.size()), data.feature_dim());
    for (std::size_t t = 0; t < test_rows.size(); ++t) {
      query.row(static_cast<Index>(t)) = data.features().row(test_rows[t]);
    }
    const Matrix dist = squared_distances(train.features(), query);
    for (std::size_t g = 0; g < out.grid.size(); ++g) {
      for (std::size_t t = 0; t < test_rows.size(); ++t) {
        if (vote(dist.row(static_cast<Index>(t)).transpose(), train.labels(), out.grid[g]) ==
            data.label(test_rows[t])) {
          out.cv_scores[g] += 1.0;
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < out.grid.size(); ++g) {
    if (out.cv_scores[g] > out.cv_scores[best]) best = g;
  }
  for (double& s : out.cv_scores) s /= static_cast<double>(folds);
  out.k = out.grid[best];
  return out;
}

}  // namespace dlpd
