#include <doctest.h>

#include "dlpd/classifier.hpp"
#include "dlpd/simulation.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace dlpd;
using testing_support::random_spd;
using testing_support::random_vector;

namespace {

OracleModel constant_oracle(const Vector& mx, const Vector& my, const Matrix& s) {
  const Index p = mx.size();
  return OracleModel(
      p, 1, [mx](const CovariatePoint&) { return mx; }, [my](const CovariatePoint&) { return my; },
      [s](const CovariatePoint&) { return s; });
}

DataSet small_training(Rng& rng, Index n1, Index n2, Index p) {
  const Index n = n1 + n2;
  Matrix x = testing_support::random_matrix(rng, n, p);
  x.topRows(n1).col(0).array() += 2.0;
  Matrix u(n, 1);
  for (Index i = 0; i < n; ++i) u(i, 0) = rng.uniform();
  std::vector<ClassLabel> labels(static_cast<std::size_t>(n), ClassLabel::Y);
  std::fill_n(labels.begin(), n1, ClassLabel::X);
  return DataSet(x, u, labels);
}

}  // namespace

TEST_CASE("score and tie convention") {
  Vector mx(2), my(2), beta(2);
  mx << 1, 2;
  my << -1, 0;
  beta = mx - my;
  CHECK(decide(discriminant_score(mx, mx, my, beta)) == ClassLabel::X);
  CHECK(decide(discriminant_score(my, mx, my, beta)) == ClassLabel::Y);
  CHECK(discriminant_score(mx, mx, my, beta) == doctest::Approx(0.5 * beta.squaredNorm()));
  const Vector mid = 0.5 * (mx + my);
  CHECK(decide(discriminant_score(mid, mx, my, beta)) == ClassLabel::X);
  CHECK(decide(discriminant_score(my, mx, my, Vector::Zero(2))) == ClassLabel::X);
}

TEST_CASE("large lambda sends everything to X") {
  Rng rng(RngSeed{1});
  const DataSet data = small_training(rng, 30, 30, 3);
  const DlpdModel model(data, Bandwidth::uniform(1, 0.8), Bandwidth::uniform(1, 0.8),
                        KernelSpec::truncated_gaussian(), 1e6);
  for (int t = 0; t < 20; ++t) {
    const Vector z = random_vector(rng, 3) * 5.0;
    CHECK(dlpd_classify(model, z, CovariatePoint{rng.uniform()}) == ClassLabel::X);
  }
  CHECK(model.beta_hat(CovariatePoint{0.5}).isZero(0.0));
}

TEST_CASE("model validation") {
  Rng rng(RngSeed{2});
  const DataSet data = small_training(rng, 5, 5, 2);
  const auto k = KernelSpec::epanechnikov();
  CHECK_THROWS_AS(DlpdModel(data, Bandwidth::uniform(1, 1), Bandwidth::uniform(1, 1), k, -1.0), Error);
  CHECK_THROWS_AS(DlpdModel(data, Bandwidth::uniform(2, 1), Bandwidth::uniform(1, 1), k, 0.1), Error);
  const DataSet one_class = data.subset(data.class_rows(ClassLabel::X));
  CHECK_THROWS_AS(DlpdModel(one_class, Bandwidth::uniform(1, 1), Bandwidth::uniform(1, 1), k, 0.1), Error);
}

TEST_CASE("cache and batch prediction agree with single queries") {
  Rng rng(RngSeed{3});
  const DataSet data = small_training(rng, 40, 40, 4);
  const Bandwidth h = Bandwidth::uniform(1, 0.6);
  const DlpdModel cached(data, h, h, KernelSpec::truncated_gaussian(), 0.2);
  const DlpdModel plain(data, h, h, KernelSpec::truncated_gaussian(), 0.2, false);
  Matrix z = testing_support::random_matrix(rng, 30, 4);
  Matrix u(30, 1);
  for (Index i = 0; i < 30; ++i) u(i, 0) = i < 15 ? rng.uniform() : u(i - 15, 0);
  const auto preds = predict_batch(cached, z, u);
  CHECK(cached.cache_size() == 15);
  CHECK(plain.cache_size() == 0);
  for (Index i = 0; i < 30; ++i) {
    const CovariatePoint ui{u(i, 0)};
    const double s = plain.score(z.row(i).transpose(), ui);
    CHECK(preds[static_cast<std::size_t>(i)].status == PredictionStatus::Ok);
    CHECK(preds[static_cast<std::size_t>(i)].score == doctest::Approx(s).epsilon(1e-12));
    CHECK(preds[static_cast<std::size_t>(i)].label == decide(s));
  }
}

TEST_CASE("empty window in batch prediction is recorded") {
  Rng rng(RngSeed{4});
  const DataSet data = small_training(rng, 10, 10, 2);
  const DlpdModel model(data, Bandwidth::uniform(1, 0.1), Bandwidth::uniform(1, 0.1),
                        KernelSpec::epanechnikov(), 0.1);
  Matrix z = Matrix::Zero(1, 2);
  Matrix u = Matrix::Constant(1, 1, 5.0);
  CHECK(predict_batch(model, z, u)[0].status == PredictionStatus::EmptyWindow);
  CHECK_THROWS_AS(model.score(Vector::Zero(2), CovariatePoint{5.0}), EmptyWindow);
}

TEST_CASE("label swap flips non-tie decisions") {
  Rng rng(RngSeed{5});
  const DataSet data = small_training(rng, 30, 30, 3);
  std::vector<ClassLabel> swapped;
  for (ClassLabel c : data.labels()) swapped.push_back(other(c));
  const DataSet flipped(data.features(), data.covariates(), swapped);
  const Bandwidth h = Bandwidth::uniform(1, 0.7);
  const DlpdModel a(data, h, h, KernelSpec::truncated_gaussian(), 0.1);
  const DlpdModel b(flipped, h, h, KernelSpec::truncated_gaussian(), 0.1);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const Vector z = random_vector(rng, 3) * 2.0;
    const CovariatePoint u{rng.uniform()};
    const double sa = a.score(z, u);
    if (std::abs(sa) <= 1e-9) continue;
    ++checked;
    CHECK(decide(sa) != decide(b.score(z, u)));
  }
  CHECK(checked > 40);
}

TEST_CASE("decision invariant to positive rescaling of beta") {
  Rng rng(RngSeed{6});
  for (int t = 0; t < 100; ++t) {
    const Vector mx = random_vector(rng, 4), my = random_vector(rng, 4), beta = random_vector(rng, 4);
    const Vector z = random_vector(rng, 4);
    CHECK(decide(discriminant_score(z, mx, my, beta)) == decide(discriminant_score(z, mx, my, 7.3 * beta)));
  }
}

TEST_CASE("bayes rule examples") {
  const Index p = 4;
  Vector e1 = Vector::Zero(p);
  e1[0] = 1;
  const OracleModel o = constant_oracle(e1, -e1, Matrix::Identity(p, p));
  Vector z = Vector::Constant(p, -5.0);
  z[0] = 0.3;
  CHECK(bayes_classify(o, z, CovariatePoint{0.1}) == ClassLabel::X);

  const OracleModel same = constant_oracle(e1, e1, Matrix::Identity(p, p));
  CHECK(bayes_classify(same, random_vector(*std::make_unique<Rng>(RngSeed{1}), p), CovariatePoint{0.1}) == ClassLabel::X);
  CHECK(mahalanobis_delta(same, CovariatePoint{0.1}) == 0.0);
  CHECK(bayes_conditional_risk(same, CovariatePoint{0.1}) == 0.5);

  Vector d20 = Vector::Zero(30);
  d20.head(20).setOnes();
  const OracleModel id20 = constant_oracle(d20, Vector::Zero(30), Matrix::Identity(30, 30));
  CHECK(mahalanobis_delta(id20, CovariatePoint{0.5}) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-14));

  const OracleModel m1 = oracle_of(ModelId::M1, 50);
  CHECK(mahalanobis_delta(m1, CovariatePoint{0.5}) == doctest::Approx(std::sqrt(23.0 / 3.0)).epsilon(1e-12));

  // z = mu_Y - 3 Sigma^{1/2} e with e along Sigma^{1/2} beta.
  const CovariatePoint u{0.4};
  const Matrix s = m1.sigma(u);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Matrix root = eig.operatorSqrt();
  const Vector beta = bayes_direction(m1, u);
  const Vector e = (root * beta).normalized();
  CHECK(bayes_classify(m1, m1.mu_y(u) - 3.0 * root * e, u) == ClassLabel::Y);
}

TEST_CASE("singular covariance is rejected") {
  const OracleModel o = constant_oracle(Vector::Ones(3), Vector::Zero(3), Matrix::Ones(3, 3));
  CHECK_THROWS_AS(mahalanobis_delta(o, CovariatePoint{0.2}), Error);
  CHECK_THROWS_AS(bayes_direction(oracle_of(ModelId::M3, 25), CovariatePoint{1.0}), Error);
}

TEST_CASE("model 4 risk against the equicorrelation closed form") {
  const Index p = 30;
  const OracleModel o = oracle_of(ModelId::M4, p);
  for (const auto& uv : {std::pair{0.5, 0.5}, std::pair{0.2, 0.6}, std::pair{0.9, 0.05}}) {
    const CovariatePoint u{uv.first, uv.second};
    const double rho = std::abs(uv.first - uv.second) / (uv.first + uv.second);
    const Vector d = o.mu_x(u) - o.mu_y(u);
    // (rho J + (1 - rho) I)^{-1} = (I - rho / (1 + (p - 1) rho) J) / (1 - rho)
    const double sum = d.sum();
    const double q = (d.squaredNorm() - rho / (1.0 + (p - 1) * rho) * sum * sum) / (1.0 - rho);
    const double expect = std_normal_cdf(-0.5 * std::sqrt(q));
    const double r = bayes_conditional_risk(o, u);
    CHECK(r > 0.0);
    CHECK(r < 0.5);
    CHECK(std::abs(r - expect) < 1e-10);
  }
}

TEST_CASE("plug-in risk at the truth equals the bayes risk") {
  Rng rng(RngSeed{8});
  for (int t = 0; t < 100; ++t) {
    const Index p = 1 + static_cast<Index>(rng.below(8));
    const Vector mx = random_vector(rng, p), my = random_vector(rng, p);
    const OracleModel o = constant_oracle(mx, my, random_spd(rng, p));
    const CovariatePoint u{0.3};
    const PlugInRisk r = dlpd_conditional_risk(mx, my, bayes_direction(o, u), o, u);
    CHECK_FALSE(r.degenerate_direction);
    CHECK(std::abs(r.risk - bayes_conditional_risk(o, u)) < 1e-12);
  }
}

TEST_CASE("plug-in risk degenerate and orthogonal directions") {
  Vector mx(2), my(2);
  mx << 1, 0;
  my << -1, 0;
  const OracleModel o = constant_oracle(mx, my, Matrix::Identity(2, 2));
  const CovariatePoint u{0.5};
  Vector beta(2);
  beta << 0, 1;
  CHECK(dlpd_conditional_risk(mx, my, beta, o, u).risk == 0.5);
  const PlugInRisk zero = dlpd_conditional_risk(mx, my, Vector::Zero(2), o, u);
  CHECK(zero.degenerate_direction);
  CHECK(zero.risk == 0.5);
}

TEST_CASE("bayes risk decreases as the mean gap grows") {
  Rng rng(RngSeed{9});
  const Matrix s = random_spd(rng, 5);
  const Vector d = random_vector(rng, 5);
  double prev = 1.0;
  for (double c : {1.0, 2.0, 4.0}) {
    const double r = bayes_conditional_risk(constant_oracle(c * d, Vector::Zero(5), s), CovariatePoint{0.5});
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("expected risk integration") {
  const ExpectedRisk r1 = bayes_expected_risk(oracle_of(ModelId::M1, 50));
  CHECK(r1.method == IntegrationMethod::Quadrature);
  CHECK(r1.value == doctest::Approx(0.0831120).epsilon(1e-5));

  const ExpectedRisk r2 = bayes_expected_risk(oracle_of(ModelId::M2, 50));
  CHECK(std::abs(r2.value - 0.041) < 0.002);

  // Quadrature and Monte Carlo agree on Model 4.
  const OracleModel o4 = oracle_of(ModelId::M4, 30);
  const ExpectedRisk q = bayes_expected_risk(o4, {IntegrationMethod::Quadrature, 1e-6});
  RiskIntegration mc;
  mc.method = IntegrationMethod::MonteCarlo;
  mc.mc_draws = 20000;
  const ExpectedRisk m = bayes_expected_risk(o4, mc);
  CHECK(m.standard_error > 0.0);
  CHECK(std::abs(q.value - m.value) < 4.0 * m.standard_error);
}
