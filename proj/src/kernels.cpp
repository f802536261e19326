#include "dlpd/kernels.hpp"

#include <cmath>
#include <numbers>

namespace dlpd {

KernelSpec KernelSpec::epanechnikov() { return KernelSpec(KernelKind::Epanechnikov, 1.0, 0.75); }

KernelSpec KernelSpec::truncated_gaussian(double cutoff) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw Error(ErrorKind::InvalidArgument, "truncated Gaussian cutoff must be positive");
  }
  const double mass = std_normal_cdf(cutoff) - std_normal_cdf(-cutoff);
  return KernelSpec(KernelKind::TruncatedGaussian, cutoff,
                    1.0 / (std::sqrt(2.0 * std::numbers::pi) * mass));
}

KernelSpec KernelSpec::parse(std::string_view name, double tgauss_cutoff) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "tgauss") return truncated_gaussian(tgauss_cutoff);
  throw Error(ErrorKind::InvalidArgument,
              "unknown kernel '" + std::string(name) + "' (expected epanechnikov|tgauss)");
}

std::string KernelSpec::name() const {
  return kind_ == KernelKind::Epanechnikov ? "epanechnikov" : "tgauss";
}

double kernel_eval(const KernelSpec& spec, double u) { return spec(u); }

Bandwidth::Bandwidth(Vector diag) : diag_(std::move(diag)) {
  if (diag_.size() < 1) throw Error(ErrorKind::InvalidArgument, "Bandwidth: empty");
  for (Index i = 0; i < diag_.size(); ++i) {
    if (!(diag_[i] > 0.0) || !std::isfinite(diag_[i])) {
      throw Error(ErrorKind::InvalidArgument, "Bandwidth: entries must be positive and finite");
    }
  }
}

Bandwidth Bandwidth::uniform(Index d, double h) { return Bandwidth(Vector::Constant(d, h)); }

Bandwidth Bandwidth::scaled(double factor) const { return Bandwidth(diag_ * factor); }

double product_kernel_weight(const KernelSpec& spec, const Bandwidth& h,
                             const Eigen::Ref<const Vector>& delta) {
  if (delta.size() != h.dim()) {
    throw Error(ErrorKind::InvalidArgument, "product_kernel_weight: dimension mismatch");
  }
  double w = 1.0;
  for (Index i = 0; i < delta.size(); ++i) {
    const double k = spec(delta[i] / h[i]);
    if (k == 0.0) return 0.0;
    w *= k / h[i];
  }
  return w;
}

Bandwidth rate_bandwidth(Index n, Index p, Index d, double scale) {
  if (n < 2 || p < 2 || d < 1 || !(scale > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rate_bandwidth: need n>=2, p>=2, d>=1, scale>0");
  }
  const double ratio = std::log(static_cast<double>(p)) / static_cast<double>(n);
  return Bandwidth::uniform(d, scale * std::pow(ratio, 1.0 / (4.0 + static_cast<double>(d))));
}

}  // namespace dlpd
