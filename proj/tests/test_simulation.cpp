#include <doctest.h>

#include "dlpd/simulation.hpp"

#include <cmath>

using namespace dlpd;

namespace {

CovariatePoint point_for(ModelId id, Rng& rng) {
  if (covariate_dim(id) == 1) return CovariatePoint{rng.uniform()};
  return CovariatePoint{rng.uniform(), rng.uniform()};
}

}  // namespace

TEST_CASE("model ids") {
  CHECK(parse_model_id("M3") == ModelId::M3);
  CHECK(parse_model_id("4") == ModelId::M4);
  CHECK(to_string(ModelId::M2) == "M2");
  CHECK(covariate_dim(ModelId::M4) == 2);
  CHECK(covariate_dim(ModelId::M1) == 1);
  CHECK_THROWS_AS(parse_model_id("M5"), Error);
  CHECK_THROWS_AS((ModelSpec{ModelId::M1, 20, 10, 10, {}}.validate()), Error);
}

TEST_CASE("oracle examples") {
  const OracleModel m1 = oracle_of(ModelId::M1, 30);
  CHECK(m1.sigma(CovariatePoint{0.7})(0, 2) == 0.25);

  const Matrix s3 = oracle_of(ModelId::M3, 25).sigma(CovariatePoint{1.0});
  CHECK(s3.isOnes(0.0));

  const OracleModel m4 = oracle_of(ModelId::M4, 25);
  CHECK(m4.sigma(CovariatePoint{0.3, 0.3}).isIdentity(0.0));
  CHECK_THROWS_AS(m4.sigma(CovariatePoint{0.0, 0.0}), Error);

  const Vector mx = m4.mu_x(CovariatePoint{0.1, 0.2});
  CHECK(mx[0] == doctest::Approx(0.5 + std::sin(0.3)));
  CHECK(mx[24] == doctest::Approx(std::cos(0.3)));

  const OracleModel m2 = oracle_of(ModelId::M2, 22);
  CHECK(m2.mu_y(CovariatePoint{0.4})[19] == 0.4);
  CHECK(m2.mu_y(CovariatePoint{0.4})[20] == doctest::Approx(std::exp(0.4)));
  CHECK(m2.sigma(CovariatePoint{0.4})(3, 5) == doctest::Approx(0.16));

  CHECK_THROWS_AS(m1.sigma(CovariatePoint{0.1, 0.2}), Error);
}

TEST_CASE("covariances are symmetric with unit diagonal and PSD") {
  Rng rng(RngSeed{5});
  for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4}) {
    const OracleModel o = oracle_of(id, 30);
    for (int t = 0; t < 100; ++t) {
      const Matrix s = o.sigma(point_for(id, rng));
      CHECK((s - s.transpose()).isZero(0.0));
      CHECK(s.diagonal().isOnes(0.0));
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("model 1 risk is constant in u") {
  const OracleModel o = oracle_of(ModelId::M1, 50);
  double lo = 1.0;
  double hi = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double r = bayes_conditional_risk(o, CovariatePoint{k / 20.0});
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi - lo < 1e-12);
  CHECK(lo == doctest::Approx(0.0831120).epsilon(1e-5));
}

TEST_CASE("sampling is deterministic and shaped") {
  const ModelSpec spec{ModelId::M4, 25, 30, 20, RngSeed{7}};
  const DataSet a = sample_dataset(spec);
  const DataSet b = sample_dataset(spec);
  CHECK(a.features() == b.features());
  CHECK(a.covariates() == b.covariates());
  CHECK(a.count(ClassLabel::X) == 30);
  CHECK(a.covariate_dim() == 2);
  CHECK(a.label(29) == ClassLabel::X);
  CHECK(a.label(30) == ClassLabel::Y);
  CHECK(a.covariates().minCoeff() >= 0.0);
  CHECK(a.covariates().maxCoeff() < 1.0);

  const DataSet t = sample_test_dataset(spec, 5, 5);
  CHECK(t.size() == 10);
  CHECK(t.features().row(0) != a.features().row(0));
  CHECK(test_seed(RngSeed{7}).value != 7u);
}

TEST_CASE("model 1 sample mean") {
  const ModelSpec spec{ModelId::M1, 25, 10000, 0, RngSeed{11}};
  const DataSet data = sample_dataset(spec);
  const Vector mean = data.features().colwise().mean();
  for (Index j = 20; j < 25; ++j) CHECK(std::abs(mean[j] - 1.0) < 0.05);
  for (Index j = 0; j < 20; ++j) CHECK(std::abs(mean[j] - 1.0) < 0.05);
}

TEST_CASE("model 3 residuals have unit variance") {
  const ModelSpec spec{ModelId::M3, 25, 10000, 0, RngSeed{12}};
  const DataSet data = sample_dataset(spec);
  // mu_X(u) = u on every coordinate.
  Matrix resid = data.features();
  for (Index i = 0; i < data.size(); ++i) resid.row(i).array() -= data.covariates()(i, 0);
  const Vector var = resid.array().square().colwise().mean();
  for (Index j = 0; j < 25; ++j) CHECK(std::abs(var[j] - 1.0) < 0.1);
}

TEST_CASE("true beta") {
  const ModelSpec m1{ModelId::M1, 50, 1, 1, {}};
  const Vector b1 = true_beta(m1, CovariatePoint{0.2});
  CHECK((b1 - true_beta(m1, CovariatePoint{0.9})).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(b1.tail(50 - 22).cwiseAbs().maxCoeff() < 1e-10);

  const ModelSpec m4{ModelId::M4, 30, 1, 1, {}};
  const OracleModel o4 = oracle_of(m4);
  const CovariatePoint u4{0.3, 0.3};
  CHECK((true_beta(m4, u4) - (o4.mu_x(u4) - o4.mu_y(u4))).cwiseAbs().maxCoeff() < 1e-15);

  const ModelSpec m3{ModelId::M3, 50, 1, 1, {}};
  const OracleModel o3 = oracle_of(m3);
  const CovariatePoint u3{0.5};
  const Vector resid = o3.sigma(u3) * true_beta(m3, u3) - (o3.mu_x(u3) - o3.mu_y(u3));
  CHECK(resid.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("closed-form mahalanobis matches the cholesky solve") {
  Rng rng(RngSeed{21});
  for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4}) {
    for (Index p : {21, 22, 60}) {
      const OracleModel o = oracle_of(id, p);
      REQUIRE(o.has_closed_form_delta());
      for (int t = 0; t < 50; ++t) {
        const CovariatePoint u = point_for(id, rng);
        const double fast = mahalanobis_delta(o, u);
        const double slow = mahalanobis_delta_cholesky(o, u);
        CHECK(std::abs(fast - slow) <= 1e-9 * std::max(1.0, slow));
      }
    }
  }
  CHECK_THROWS_AS(mahalanobis_delta(oracle_of(ModelId::M3, 25), CovariatePoint{1.0}), Error);
  CHECK_THROWS_AS(mahalanobis_delta(oracle_of(ModelId::M2, 25), CovariatePoint{1.0}), Error);
}
