#pragma once

#include "dlpd/core.hpp"
#include "dlpd/kernels.hpp"

namespace dlpd {

// Total kernel weight at or below this is an empty window.
inline constexpr double kWeightFloor = 1e-12;

/// Kernel-weighted mean and covariance of one class at one covariate point.
struct ClassMoments {
  Vector mean;
  Matrix covariance;
  double total_weight = 0.0;
};

struct LocalMoments {
  Vector mu_x_hat;
  Vector mu_y_hat;
  Matrix sigma_hat;  // (n1/n) Sigma_X(u) + (n2/n) Sigma_Y(u)
  double effective_weight_x = 0.0;
  double effective_weight_y = 0.0;

  Vector delta_hat() const { return mu_x_hat - mu_y_hat; }
};

// --- OpenMP kernels -------------------------------------------------------

// w_j = K_H(U_j - u) for every row of `covariates`.
Vector kernel_weights(const Matrix& covariates, const Vector& u, const Bandwidth& h,
                      const KernelSpec& spec);

// Weighted mean and covariance of the rows of `features`. The covariance is
// accumulated from centred rows, which is algebraically the
// second-moment-minus-outer-product form but stays PSD under roundoff.
// Throws EmptyWindow(label) when sum(weights) <= weight_floor.
ClassMoments weighted_moments(const Matrix& features, const Vector& weights, ClassLabel label,
                              double weight_floor = kWeightFloor, bool with_covariance = true);

// --- estimators -------------------------------------------------------------

Vector nw_mean(const DataSet& data, ClassLabel label, const CovariatePoint& u,
               const Bandwidth& h, const KernelSpec& spec, double weight_floor = kWeightFloor);

Matrix local_class_covariance(const DataSet& data, ClassLabel label, const CovariatePoint& u,
                              const Bandwidth& h, const KernelSpec& spec,
                              double weight_floor = kWeightFloor);

// Mean and covariance sharing one weight vector and denominator.
ClassMoments local_class_moments(const DataSet& data, ClassLabel label, const CovariatePoint& u,
                                 const Bandwidth& h, const KernelSpec& spec,
                                 double weight_floor = kWeightFloor);

LocalMoments pooled_local_moments(const DataSet& data, const CovariatePoint& u,
                                  const Bandwidth& hx, const Bandwidth& hy,
                                  const KernelSpec& spec, double weight_floor = kWeightFloor);

}  // namespace dlpd
