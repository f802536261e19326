#include "dlpd/local_moments_reference.hpp"

namespace dlpd::reference {

Vector kernel_weights(const Matrix& covariates, const Vector& u, const Bandwidth& h,
                      const KernelSpec& spec) {
  Vector w(covariates.rows());
  for (Index j = 0; j < covariates.rows(); ++j) {
    const Vector delta = covariates.row(j).transpose() - u;
    w[j] = product_kernel_weight(spec, h, delta);
  }
  return w;
}

ClassMoments weighted_moments(const Matrix& features, const Vector& weights, ClassLabel label,
                              double weight_floor) {
  const Index n = features.rows();
  const Index p = features.cols();
  double s0 = 0.0;
  Vector s1 = Vector::Zero(p);
  Matrix s2 = Matrix::Zero(p, p);
  for (Index j = 0; j < n; ++j) {
    const double w = weights[j];
    s0 += w;
    for (Index a = 0; a < p; ++a) {
      s1[a] += w * features(j, a);
      for (Index b = 0; b < p; ++b) s2(a, b) += w * features(j, a) * features(j, b);
    }
  }
  if (!(s0 > weight_floor)) {
    throw EmptyWindow(label, "empty kernel window for class " + std::string(to_string(label)));
  }
  ClassMoments out;
  out.total_weight = s0;
  out.mean = s1 / s0;
  out.covariance.resize(p, p);
  for (Index a = 0; a < p; ++a) {
    for (Index b = 0; b < p; ++b) out.covariance(a, b) = s2(a, b) / s0 - s1[a] * s1[b] / (s0 * s0);
  }
  return out;
}

LocalMoments pooled_local_moments(const DataSet& data, const CovariatePoint& u,
                                  const Bandwidth& hx, const Bandwidth& hy,
                                  const KernelSpec& spec, double weight_floor) {
  const auto wx = reference::kernel_weights(data.class_covariates(ClassLabel::X), u.coords(), hx, spec);
  const auto wy = reference::kernel_weights(data.class_covariates(ClassLabel::Y), u.coords(), hy, spec);
  ClassMoments mx = reference::weighted_moments(data.class_features(ClassLabel::X), wx, ClassLabel::X,
                                     weight_floor);
  ClassMoments my = reference::weighted_moments(data.class_features(ClassLabel::Y), wy, ClassLabel::Y,
                                     weight_floor);
  const double n = static_cast<double>(data.size());
  LocalMoments out;
  out.sigma_hat = (static_cast<double>(data.count(ClassLabel::X)) / n) * mx.covariance +
                  (static_cast<double>(data.count(ClassLabel::Y)) / n) * my.covariance;
  out.mu_x_hat = mx.mean;
  out.mu_y_hat = my.mean;
  out.effective_weight_x = mx.total_weight;
  out.effective_weight_y = my.total_weight;
  return out;
}

}  // namespace dlpd::reference
