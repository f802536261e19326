#include "dlpd/local_moments.hpp"

#include <sstream>

namespace dlpd {

namespace {

void check_point(const Matrix& covariates, const Vector& u, const Bandwidth& h) {
  if (u.size() != covariates.cols() || h.dim() != covariates.cols()) {
    throw Error(ErrorKind::InvalidArgument, "covariate point / bandwidth dimension mismatch");
  }
}

[[noreturn]] void throw_empty(ClassLabel label, double total) {
  std::ostringstream os;
  os << "empty kernel window for class " << to_string(label) << " (total weight " << total
     << ")";
  throw EmptyWindow(label, os.str());
}

}  // namespace

Vector kernel_weights(const Matrix& covariates, const Vector& u, const Bandwidth& h,
                      const KernelSpec& spec) {
  check_point(covariates, u, h);
  const Index n = covariates.rows();
  const Index d = covariates.cols();
  Vector w(n);
#pragma omp parallel for schedule(static) if (n > 4096)
  for (Index j = 0; j < n; ++j) {
    double prod = 1.0;
    for (Index k = 0; k < d && prod != 0.0; ++k) {
      prod *= spec((covariates(j, k) - u[k]) / h[k]) / h[k];
    }
    w[j] = prod;
  }
  return w;
}

ClassMoments weighted_moments(const Matrix& features, const Vector& weights, ClassLabel label,
                              double weight_floor, bool with_covariance) {
  const Index p = features.cols();
  const double total = weights.sum();
  if (!(total > weight_floor)) throw_empty(label, total);

  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(weights.size()));
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) active.push_back(j);
  }
  const auto k = static_cast<Index>(active.size());

  ClassMoments out;
  out.total_weight = total;
  out.mean = Vector::Zero(p);
  for (Index a = 0; a < k; ++a) {
    const Index j = active[static_cast<std::size_t>(a)];
    out.mean.noalias() += (weights[j] / total) * features.row(j).transpose();
  }
  if (!with_covariance) return out;

  // Rows sqrt(w_j / W) (x_j - mean); covariance = Z^T Z.
  Matrix z(k, p);
  for (Index a = 0; a < k; ++a) {
    const Index j = active[static_cast<std::size_t>(a)];
    z.row(a) = std::sqrt(weights[j] / total) * (features.row(j) - out.mean.transpose());
  }
  out.covariance.resize(p, p);
#pragma omp parallel for schedule(dynamic, 8) if (p > 64)
  for (Index c = 0; c < p; ++c) {
    out.covariance.col(c).tail(p - c).noalias() = z.rightCols(p - c).transpose() * z.col(c);
  }
  out.covariance.triangularView<Eigen::StrictlyUpper>() =
      out.covariance.triangularView<Eigen::StrictlyLower>().transpose();
  return out;
}

ClassMoments local_class_moments(const DataSet& data, ClassLabel label, const CovariatePoint& u,
                                 const Bandwidth& h, const KernelSpec& spec,
                                 double weight_floor) {
  const Vector w = kernel_weights(data.class_covariates(label), u.coords(), h, spec);
  return weighted_moments(data.class_features(label), w, label, weight_floor, true);
}

Vector nw_mean(const DataSet& data, ClassLabel label, const CovariatePoint& u,
               const Bandwidth& h, const KernelSpec& spec, double weight_floor) {
  const Vector w = kernel_weights(data.class_covariates(label), u.coords(), h, spec);
  return weighted_moments(data.class_features(label), w, label, weight_floor, false).mean;
}

Matrix local_class_covariance(const DataSet& data, ClassLabel label, const CovariatePoint& u,
                              const Bandwidth& h, const KernelSpec& spec,
                              double weight_floor) {
  return local_class_moments(data, label, u, h, spec, weight_floor).covariance;
}

LocalMoments pooled_local_moments(const DataSet& data, const CovariatePoint& u,
                                  const Bandwidth& hx, const Bandwidth& hy,
                                  const KernelSpec& spec, double weight_floor) {
  ClassMoments mx = local_class_moments(data, ClassLabel::X, u, hx, spec, weight_floor);
  ClassMoments my = local_class_moments(data, ClassLabel::Y, u, hy, spec, weight_floor);
  const double n = static_cast<double>(data.size());
  const double wx = static_cast<double>(data.count(ClassLabel::X)) / n;
  const double wy = static_cast<double>(data.count(ClassLabel::Y)) / n;

  LocalMoments out;
  out.sigma_hat = wx * mx.covariance + wy * my.covariance;
  out.mu_x_hat = std::move(mx.mean);
  out.mu_y_hat = std::move(my.mean);
  out.effective_weight_x = mx.total_weight;
  out.effective_weight_y = my.total_weight;
  return out;
}

}  // namespace dlpd
