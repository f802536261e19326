#pragma once

#include "dlpd/core.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace dlpd {

enum class KernelKind { Epanechnikov, TruncatedGaussian };

/// Symmetric, compactly supported univariate smoothing kernel.
class KernelSpec {
 public:
  static KernelSpec epanechnikov();
  // Standard normal density restricted to |u| <= cutoff and renormalized to
  // unit mass.
  static KernelSpec truncated_gaussian(double cutoff = 4.0);
  // Accepts "epanechnikov" or "tgauss".
  static KernelSpec parse(std::string_view name, double tgauss_cutoff = 4.0);

  KernelKind kind() const noexcept { return kind_; }
  double cutoff() const noexcept { return cutoff_; }
  // Half-width of the support: 1 for Epanechnikov, the cutoff otherwise.
  double support() const noexcept { return kind_ == KernelKind::Epanechnikov ? 1.0 : cutoff_; }
  std::string name() const;

  double operator()(double u) const noexcept {
    const double a = u < 0 ? -u : u;
    if (a >= support()) return 0.0;
    if (kind_ == KernelKind::Epanechnikov) return 0.75 * (1.0 - u * u);
    return norm_ * std::exp(-0.5 * u * u);
  }

 private:
  KernelSpec(KernelKind kind, double cutoff, double norm)
      : kind_(kind), cutoff_(cutoff), norm_(norm) {}

  KernelKind kind_;
  double cutoff_;
  double norm_;
};

double kernel_eval(const KernelSpec& spec, double u);

/// Diagonal bandwidth matrix H = diag(h_1, ..., h_d).
class Bandwidth {
 public:
  explicit Bandwidth(Vector diag);
  static Bandwidth uniform(Index d, double h);

  const Vector& diag() const noexcept { return diag_; }
  Index dim() const noexcept { return diag_.size(); }
  double operator[](Index i) const { return diag_[i]; }
  Bandwidth scaled(double factor) const;

 private:
  Vector diag_;
};

// K_H(delta) = prod_i K(delta_i / h_i) / h_i
double product_kernel_weight(const KernelSpec& spec, const Bandwidth& h,
                             const Eigen::Ref<const Vector>& delta);

// Every entry scale * (log p / n)^{1/(4+d)}; the centre of the CV grids.
Bandwidth rate_bandwidth(Index n, Index p, Index d, double scale = 1.0);

}  // namespace dlpd
