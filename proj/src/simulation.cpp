#include "dlpd/simulation.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace dlpd {

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::M1: return "M1";
    case ModelId::M2: return "M2";
    case ModelId::M3: return "M3";
    case ModelId::M4: return "M4";
  }
  return "?";
}

ModelId parse_model_id(std::string_view text) {
  if (text == "M1" || text == "m1" || text == "1") return ModelId::M1;
  if (text == "M2" || text == "m2" || text == "2") return ModelId::M2;
  if (text == "M3" || text == "m3" || text == "3") return ModelId::M3;
  if (text == "M4" || text == "m4" || text == "4") return ModelId::M4;
  throw Error(ErrorKind::InvalidArgument, "unknown model '" + std::string(text) + "' (M1..M4)");
}

Index covariate_dim(ModelId id) { return id == ModelId::M4 ? 2 : 1; }

void ModelSpec::validate() const {
  if (p <= kSignalCoordinates) {
    throw Error(ErrorKind::InvalidArgument, "ModelSpec: p must be at least 21");
  }
  if (n1 < 0 || n2 < 0 || n1 + n2 < 1) {
    throw Error(ErrorKind::InvalidArgument, "ModelSpec: need n1, n2 >= 0 and n1 + n2 >= 1");
  }
}

namespace {

Vector split_vector(Index p, double head, double tail) {
  Vector v(p);
  v.head(kSignalCoordinates).setConstant(head);
  v.tail(p - kSignalCoordinates).setConstant(tail);
  return v;
}

Matrix toeplitz_power(Index p, double r) {
  Matrix s(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) s(i, j) = std::pow(r, static_cast<double>(std::abs(i - j)));
  return s;
}

Matrix equicorrelation(Index p, double rho) {
  Matrix s = Matrix::Constant(p, p, rho);
  s.diagonal().setOnes();
  return s;
}

double m4_rho(const CovariatePoint& u) {
  const double s = u[0] + u[1];
  if (!(s != 0.0)) {
    throw Error(ErrorKind::DomainError, "Model 4 covariance undefined at u1 + u2 = 0");
  }
  return std::abs(u[0] - u[1]) / s;
}

// delta^T Sigma^{-1} delta for Sigma = (r^|i-j|), whose inverse is
// tridiagonal. The conditioning check uses the eigenvalue bounds
// (1 - r) / (1 + r) and (1 + r) / (1 - r).
double ar1_quadratic(const Vector& delta, double r) {
  const double a = std::abs(r);
  if (a >= 1.0 || std::pow((1.0 - a) / (1.0 + a), 2) <= 1e-12) {
    throw Error(ErrorKind::SingularCovariance, "covariance is numerically singular");
  }
  const Index p = delta.size();
  double q = delta.squaredNorm();
  if (p > 2) q += r * r * delta.segment(1, p - 2).squaredNorm();
  if (p > 1) q -= 2.0 * r * delta.head(p - 1).dot(delta.tail(p - 1));
  return q / (1.0 - r * r);
}

// delta^T Sigma^{-1} delta for Sigma = rho 11^T + (1 - rho) I, eigenvalues
// 1 - rho and 1 + (p - 1) rho.
double equicorrelation_quadratic(const Vector& delta, double rho) {
  const auto p = static_cast<double>(delta.size());
  const double lo = 1.0 - rho;
  const double hi = 1.0 + (p - 1.0) * rho;
  if (!(lo > 1e-12 * hi) || !(hi > 0.0)) {
    throw Error(ErrorKind::SingularCovariance, "covariance is numerically singular");
  }
  const double sum = delta.sum();
  return (delta.squaredNorm() - rho / hi * sum * sum) / lo;
}

void check_dim(const CovariatePoint& u, Index d) {
  if (u.dim() != d) throw Error(ErrorKind::InvalidArgument, "covariate point has the wrong dimension");
}

// Cholesky for sampling; retries with a growing diagonal jitter starting at
// 1e-12 when Sigma(u) is numerically singular.
Matrix sampling_factor(const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  double jitter = 1e-12;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-6) {
      throw Error(ErrorKind::SingularCovariance, "Cholesky failed for sampling covariance");
    }
    std::cerr << "warning: Cholesky failed, retrying with diagonal jitter " << jitter << '\n';
    llt.compute(sigma + jitter * Matrix::Identity(sigma.rows(), sigma.cols()));
    jitter *= 10.0;
  }
  return llt.matrixL();
}

}  // namespace

OracleModel oracle_of(ModelId id, Index p) {
  if (p <= kSignalCoordinates) throw Error(ErrorKind::InvalidArgument, "oracle_of: p must be >= 21");
  const Index d = covariate_dim(id);
  switch (id) {
    case ModelId::M1: {
      const Matrix sigma = toeplitz_power(p, 0.5);
      return OracleModel(
          p, d,
          [p, d](const CovariatePoint& u) { check_dim(u, d); return Vector(Vector::Ones(p)); },
          [p, d](const CovariatePoint& u) { check_dim(u, d); return split_vector(p, 0.0, 1.0); },
          [sigma, d](const CovariatePoint& u) { check_dim(u, d); return sigma; },
          [q = ar1_quadratic(split_vector(p, 1.0, 0.0), 0.5), d](const CovariatePoint& u) {
            check_dim(u, d);
            return q;
          });
    }
    case ModelId::M2:
      return OracleModel(
          p, d,
          [p, d](const CovariatePoint& u) { check_dim(u, d); return Vector(Vector::Constant(p, std::exp(u[0]))); },
          [p, d](const CovariatePoint& u) { check_dim(u, d); return split_vector(p, u[0], std::exp(u[0])); },
          [p, d](const CovariatePoint& u) { check_dim(u, d); return toeplitz_power(p, u[0]); },
          [p, d](const CovariatePoint& u) {
            check_dim(u, d);
            return ar1_quadratic(split_vector(p, std::exp(u[0]) - u[0], 0.0), u[0]);
          });
    case ModelId::M3:
      return OracleModel(
          p, d,
          [p, d](const CovariatePoint& u) { check_dim(u, d); return Vector(Vector::Constant(p, u[0])); },
          [p, d](const CovariatePoint& u) { check_dim(u, d); return split_vector(p, -u[0], u[0]); },
          [p, d](const CovariatePoint& u) { check_dim(u, d); return equicorrelation(p, u[0]); },
          [p, d](const CovariatePoint& u) {
            check_dim(u, d);
            return equicorrelation_quadratic(split_vector(p, 2.0 * u[0], 0.0), u[0]);
          });
    case ModelId::M4:
      return OracleModel(
          p, d,
          [p, d](const CovariatePoint& u) {
            check_dim(u, d);
            const double s = u[0] + u[1];
            return split_vector(p, 0.5 + std::sin(s), std::cos(s));
          },
          [p, d](const CovariatePoint& u) {
            check_dim(u, d);
            return Vector(Vector::Constant(p, std::cos(u[0] + u[1])));
          },
          [p, d](const CovariatePoint& u) { check_dim(u, d); return equicorrelation(p, m4_rho(u)); },
          [p, d](const CovariatePoint& u) {
            check_dim(u, d);
            const double s = u[0] + u[1];
            return equicorrelation_quadratic(split_vector(p, 0.5 + std::sin(s) - std::cos(s), 0.0),
                                             m4_rho(u));
          });
  }
  throw Error(ErrorKind::InvalidArgument, "oracle_of: unknown model");
}

namespace {

DataSet draw(const ModelSpec& spec, Index n1, Index n2, RngSeed seed) {
  spec.validate();
  const Index p = spec.p;
  const Index d = spec.covariate_dim();
  const Index n = n1 + n2;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sample size must be positive");
  const OracleModel oracle = oracle_of(spec.id, p);
  Rng rng(seed);

  Matrix covariates(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) covariates(i, k) = rng.uniform();

  std::vector<ClassLabel> labels(static_cast<std::size_t>(n), ClassLabel::X);
  for (Index i = n1; i < n; ++i) labels[static_cast<std::size_t>(i)] = ClassLabel::Y;

  Matrix features(n, p);
  Matrix constant_factor;
  if (spec.id == ModelId::M1) constant_factor = sampling_factor(oracle.sigma(CovariatePoint{0.5}));
  Vector noise(p);
  for (Index i = 0; i < n; ++i) {
    const CovariatePoint u(Vector(covariates.row(i).transpose()));
    const Vector mean = i < n1 ? oracle.mu_x(u) : oracle.mu_y(u);
    for (Index k = 0; k < p; ++k) noise[k] = rng.normal();
    if (spec.id == ModelId::M1) {
      features.row(i) = (mean + constant_factor.triangularView<Eigen::Lower>() * noise).transpose();
    } else {
      const Matrix l = sampling_factor(oracle.sigma(u));
      features.row(i) = (mean + l.triangularView<Eigen::Lower>() * noise).transpose();
    }
  }
  return DataSet(std::move(features), std::move(covariates), std::move(labels));
}

}  // namespace

DataSet sample_dataset(const ModelSpec& spec) { return draw(spec, spec.n1, spec.n2, spec.seed); }

RngSeed test_seed(RngSeed train_seed) { return RngSeed{train_seed.value ^ 0xD1B54A32D192ED03ULL}; }

DataSet sample_test_dataset(const ModelSpec& spec, Index n1, Index n2) {
  return draw(spec, n1, n2, test_seed(spec.seed));
}

Vector true_beta(const ModelSpec& spec, const CovariatePoint& u) {
  return bayes_direction(oracle_of(spec), u);
}

}  // namespace dlpd
