#pragma once

// Serial, formula-literal versions of the local estimators. Kept for testing
// the OpenMP kernels and as the baseline in the benchmark; not used on any
// production path.

#include "dlpd/local_moments.hpp"

namespace dlpd::reference {

Vector kernel_weights(const Matrix& covariates, const Vector& u, const Bandwidth& h,
                      const KernelSpec& spec);

// sum_j w_j x_j x_j^T / sum_j w_j - [sum_j w_j x_j][sum_j w_j x_j]^T / (sum_j w_j)^2
ClassMoments weighted_moments(const Matrix& features, const Vector& weights, ClassLabel label,
                              double weight_floor = kWeightFloor);

LocalMoments pooled_local_moments(const DataSet& data, const CovariatePoint& u,
                                  const Bandwidth& hx, const Bandwidth& hy,
                                  const KernelSpec& spec, double weight_floor = kWeightFloor);

}  // namespace dlpd::reference
