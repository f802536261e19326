#pragma once

#include "dlpd/core.hpp"
#include "dlpd/kernels.hpp"

#include <optional>
#include <vector>

namespace dlpd {

/// Subset-X-variables cross-validation for one class's bandwidth.
struct BandwidthCvConfig {
  Index replications = 50;  // N random coordinate subsets
  Index subset_dim = 0;     // m; 0 selects min(10, floor(min(n1, n2) / 4))
  // Multipliers of the rate bandwidth (or of `base` when set).
  std::vector<double> grid{0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  // Relative ridge on subset covariances: ridge * mean(diag), or ridge itself
  // when the diagonal vanishes.
  double ridge = 1e-8;
  std::optional<Bandwidth> base;  // per-axis override of the grid centre

  Index resolved_subset_dim(Index n1, Index n2, Index p) const;
  void validate(Index n1, Index n2, Index p) const;
};

// (1/N) sum_r (1/n_c) sum_i [ r_i^T S_i^{-1} r_i + log|S_i| ] over leave-one-out
// local fits of random m-coordinate subsets. +infinity when some
// leave-one-out window is empty. Draws the subsets from `rng`.
double cv_bandwidth_score(const DataSet& data, ClassLabel label, const Bandwidth& h,
                          const KernelSpec& kernel, const BandwidthCvConfig& cfg, Rng& rng);

struct BandwidthSelection {
  Bandwidth bandwidth;
  double multiplier = 1.0;
  std::vector<double> scores;  // one per grid entry
};

// Argmin over the grid, ties toward the smaller multiplier. Every candidate is
// scored on the same coordinate subsets. Throws AllWindowsEmpty when no
// candidate has a finite score.
BandwidthSelection select_bandwidth(const DataSet& data, ClassLabel label,
                                    const KernelSpec& kernel, const BandwidthCvConfig& cfg,
                                    Rng& rng);

// Shared multiplier minimising the sum of both class scores.
std::pair<BandwidthSelection, BandwidthSelection> select_tied_bandwidths(
    const DataSet& data, const KernelSpec& kernel, const BandwidthCvConfig& cfg, Rng& rng);

struct LambdaCvConfig {
  Index folds = 5;
  std::vector<double> grid;  // explicit candidates; empty -> rate-based grid
  std::vector<double> rate_multipliers{0.25, 0.5, 1.0, 2.0, 4.0};
  RngSeed fold_seed{1};
};

// Fold id in [0, K) per row; each class is shuffled and dealt round-robin.
// Throws when some class has fewer than K samples.
std::vector<Index> stratified_folds(const DataSet& data, Index folds, RngSeed seed);

// Largest plug-in Mahalanobis distance over up to 11 training covariates,
// using sigma_hat + tau I with tau = sqrt(log p / n) * mean(diag sigma_hat).
double estimate_delta_sup(const DataSet& data, const Bandwidth& hx, const Bandwidth& hy,
                          const KernelSpec& kernel);

// Same quantity from the global (u-free) moments.
double estimate_static_delta(const DataSet& data);

// lambda_rate(n, p, rate_dim, delta_sup, C) for each C in the multipliers.
std::vector<double> rate_lambda_grid(const DataSet& data, Index rate_dim, double delta_sup,
                                     const std::vector<double>& multipliers);

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_scores;  // average correct count per fold
};

// Picks the index of the largest score; ties toward the larger lambda.
std::size_t best_lambda_index(const std::vector<double>& grid, const std::vector<double>& scores);

LambdaSelection select_lambda(const DataSet& data, const Bandwidth& hx, const Bandwidth& hy,
                              const KernelSpec& kernel, const LambdaCvConfig& cfg);

// Cross-validated correct-classification counts for an explicit lambda grid.
std::vector<double> lambda_cv_scores(const DataSet& data, const Bandwidth& hx,
                                     const Bandwidth& hy, const KernelSpec& kernel,
                                     const std::vector<double>& grid, Index folds,
                                     RngSeed fold_seed);

/// Everything needed to tune a DLPD fit.
struct TuningConfig {
  BandwidthCvConfig bandwidth;
  LambdaCvConfig lambda;
  bool tie_bandwidths = false;
  // Choose (bandwidth multiplier, lambda) together by maximising CV(lambda).
  bool joint = false;
  RngSeed seed{1};
  std::optional<double> fixed_multiplier;  // skip bandwidth CV
  std::optional<double> fixed_lambda;      // skip lambda CV
};

struct TuningResult {
  Bandwidth hx;
  Bandwidth hy;
  double lambda = 0.0;
  double multiplier_x = 1.0;
  double multiplier_y = 1.0;
  std::vector<double> bandwidth_scores_x;
  std::vector<double> bandwidth_scores_y;
  std::vector<double> lambda_grid;
  std::vector<double> lambda_scores;
};

TuningResult tune_dlpd(const DataSet& data, const KernelSpec& kernel, const TuningConfig& cfg);

}  // namespace dlpd
