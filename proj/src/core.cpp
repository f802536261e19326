#include "dlpd/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dlpd {

char to_char(ClassLabel c) { return c == ClassLabel::X ? 'X' : 'Y'; }

std::string_view to_string(ClassLabel c) { return c == ClassLabel::X ? "X" : "Y"; }

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, msg);
}

}  // namespace

DataSet::DataSet(Matrix features, Matrix covariates, std::vector<ClassLabel> labels)
    : features_(std::move(features)),
      covariates_(std::move(covariates)),
      labels_(std::move(labels)) {
  const Index n = features_.rows();
  require(n >= 1, "DataSet: need at least one observation");
  require(features_.cols() >= 1, "DataSet: need at least one feature column");
  require(covariates_.cols() >= 1, "DataSet: need at least one covariate column");
  if (covariates_.rows() != n || static_cast<Index>(labels_.size()) != n) {
    std::ostringstream os;
    os << "DataSet: row counts disagree (features " << n << ", covariates "
       << covariates_.rows() << ", labels " << labels_.size() << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  require(features_.allFinite(), "DataSet: non-finite feature entry");
  require(covariates_.allFinite(), "DataSet: non-finite covariate entry");

  for (Index i = 0; i < n; ++i) {
    (labels_[static_cast<std::size_t>(i)] == ClassLabel::X ? class_x_ : class_y_)
        .rows.push_back(i);
  }
  for (ClassBlock* b : {&class_x_, &class_y_}) {
    const auto m = static_cast<Index>(b->rows.size());
    b->features.resize(m, features_.cols());
    b->covariates.resize(m, covariates_.cols());
    for (Index k = 0; k < m; ++k) {
      b->features.row(k) = features_.row(b->rows[static_cast<std::size_t>(k)]);
      b->covariates.row(k) = covariates_.row(b->rows[static_cast<std::size_t>(k)]);
    }
  }
}

DataSet DataSet::subset(std::span<const Index> rows) const {
  Matrix f(static_cast<Index>(rows.size()), feature_dim());
  Matrix c(static_cast<Index>(rows.size()), covariate_dim());
  std::vector<ClassLabel> l;
  l.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    require(rows[k] >= 0 && rows[k] < size(), "DataSet::subset: row out of range");
    f.row(static_cast<Index>(k)) = features_.row(rows[k]);
    c.row(static_cast<Index>(k)) = covariates_.row(rows[k]);
    l.push_back(label(rows[k]));
  }
  return DataSet(std::move(f), std::move(c), std::move(l));
}

CovariatePoint::CovariatePoint(Vector coords) : coords_(std::move(coords)) {
  require(coords_.size() >= 1, "CovariatePoint: empty");
  require(coords_.allFinite(), "CovariatePoint: non-finite coordinate");
}

CovariatePoint::CovariatePoint(std::initializer_list<double> coords)
    : CovariatePoint(Vector(Eigen::Map<const Vector>(coords.begin(),
                                                     static_cast<Index>(coords.size())))) {}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(RngSeed seed) : seed_(seed), engine_(seed.value) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % bound));
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

Rng Rng::fork(std::uint64_t stream_id) const {
  return Rng(RngSeed{mix_seed(seed_.value ^ mix_seed(stream_id + 1))});
}

Rng seeded_rng(RngSeed seed) { return Rng(seed); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace dlpd
