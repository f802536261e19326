#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dlpd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Population membership: X is (X, U), Y is (Y, V).
enum class ClassLabel : std::uint8_t { X, Y };

inline constexpr ClassLabel other(ClassLabel c) {
  return c == ClassLabel::X ? ClassLabel::Y : ClassLabel::X;
}
char to_char(ClassLabel c);
std::string_view to_string(ClassLabel c);

enum class ErrorKind {
  InvalidArgument,
  EmptyWindow,
  AllWindowsEmpty,
  SingularCovariance,
  DegenerateDirection,
  Infeasible,
  DomainError,
  DataError,
};

/// Base of every error the library raises. `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Total kernel weight of one class at a covariate point fell to or below the
/// weight floor.
class EmptyWindow : public Error {
 public:
  EmptyWindow(ClassLabel label, const std::string& what)
      : Error(ErrorKind::EmptyWindow, what), label_(label) {}
  ClassLabel label() const noexcept { return label_; }

 private:
  ClassLabel label_;
};

/// Paired features, covariates and labels. Immutable after construction; the
/// per-class row blocks are materialized once because every local estimator
/// works class by class.
class DataSet {
 public:
  DataSet(Matrix features, Matrix covariates, std::vector<ClassLabel> labels);

  Index size() const noexcept { return features_.rows(); }
  Index feature_dim() const noexcept { return features_.cols(); }
  Index covariate_dim() const noexcept { return covariates_.cols(); }
  Index count(ClassLabel c) const noexcept {
    return static_cast<Index>(block(c).rows.size());
  }

  const Matrix& features() const noexcept { return features_; }
  const Matrix& covariates() const noexcept { return covariates_; }
  const std::vector<ClassLabel>& labels() const noexcept { return labels_; }
  ClassLabel label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }

  // Rows of one class, in original order.
  const Matrix& class_features(ClassLabel c) const noexcept { return block(c).features; }
  const Matrix& class_covariates(ClassLabel c) const noexcept { return block(c).covariates; }
  const std::vector<Index>& class_rows(ClassLabel c) const noexcept { return block(c).rows; }

  DataSet subset(std::span<const Index> rows) const;

 private:
  struct ClassBlock {
    Matrix features;
    Matrix covariates;
    std::vector<Index> rows;
  };
  const ClassBlock& block(ClassLabel c) const noexcept {
    return c == ClassLabel::X ? class_x_ : class_y_;
  }

  Matrix features_;
  Matrix covariates_;
  std::vector<ClassLabel> labels_;
  ClassBlock class_x_;
  ClassBlock class_y_;
};

class CovariatePoint {
 public:
  explicit CovariatePoint(Vector coords);
  CovariatePoint(std::initializer_list<double> coords);

  const Vector& coords() const noexcept { return coords_; }
  Index dim() const noexcept { return coords_.size(); }
  double operator[](Index i) const { return coords_[i]; }

 private:
  Vector coords_;
};

struct RngSeed {
  std::uint64_t value = 0;
};

/// Seedable random stream: mt19937_64 for the bits, 53-bit uniforms, and
/// Box-Muller normals. Single owner; parallel work forks new streams.
class Rng {
 public:
  explicit Rng(RngSeed seed);

  double uniform();  // [0, 1)
  double normal();
  std::uint64_t next_u64() { return engine_(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // Independent stream derived from this stream's seed and `stream_id`;
  // does not advance this stream.
  Rng fork(std::uint64_t stream_id) const;
  RngSeed seed() const noexcept { return seed_; }

 private:
  RngSeed seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Rng seeded_rng(RngSeed seed);

// splitmix64 finalizer, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t x);

double std_normal_cdf(double x);
double std_normal_pdf(double x);

}  // namespace dlpd
