#pragma once

#include "dlpd/core.hpp"
#include "dlpd/dantzig.hpp"

#include <vector>

namespace dlpd {

/// Covariate-free LPD: global class means, pooled covariance, one Dantzig
/// direction. Covariates are ignored at prediction time.
class StaticLpdModel {
 public:
  StaticLpdModel(Vector mu_x, Vector mu_y, Matrix sigma, double lambda);

  const Vector& mu_x() const noexcept { return mu_x_; }
  const Vector& mu_y() const noexcept { return mu_y_; }
  const Matrix& sigma() const noexcept { return sigma_; }
  double lambda() const noexcept { return lambda_; }
  const DantzigSolution& solution() const noexcept { return solution_; }
  const Vector& beta_hat() const noexcept { return solution_.beta_hat; }

  // Throws Error(Infeasible) when the LP had no solution.
  double score(const Vector& z) const;
  ClassLabel classify(const Vector& z) const;

 private:
  Vector mu_x_;
  Vector mu_y_;
  Matrix sigma_;
  double lambda_;
  DantzigSolution solution_;
};

struct StaticLpdConfig {
  Index folds = 5;
  std::vector<double> grid;  // empty -> static-rate grid
  std::vector<double> rate_multipliers{0.25, 0.5, 1.0, 2.0, 4.0};
  RngSeed fold_seed{1};
};

struct StaticLpdFit {
  StaticLpdModel model;
  std::vector<double> grid;
  std::vector<double> cv_scores;
};

// Global moments of `data`: sample means and (n1/n) S_X + (n2/n) S_Y.
StaticLpdModel static_lpd_from_data(const DataSet& data, double lambda);

// lambda chosen by stratified K-fold CV on the static rate
// C (log p / n)^{1/2} Delta_hat.
StaticLpdFit fit_static_lpd(const DataSet& data, const StaticLpdConfig& cfg = {});

// Majority vote among the k nearest feature vectors (Euclidean). Ties go to X.
ClassLabel knn_classify(const DataSet& training, const Vector& z, Index k);
std::vector<ClassLabel> knn_classify_batch(const DataSet& training, const Matrix& features,
                                           Index k);

struct KnnSelection {
  Index k = 1;
  std::vector<Index> grid;
  std::vector<double> cv_scores;
};

// Stratified K-fold CV over odd k in [1, 25] (capped by the smallest training
// fold); ties go to the smaller k.
KnnSelection select_knn_k(const DataSet& data, Index folds = 5, RngSeed fold_seed = RngSeed{1});

}  // namespace dlpd
