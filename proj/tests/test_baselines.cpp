#include "dlpd/baselines.hpp"

#include "dlpd/classifier.hpp"
#include "dlpd/simulation.hpp"
#include "doctest.h"
#include "test_support.hpp"

#include <algorithm>

using namespace dlpd;

namespace {

DataSet static_data(Rng& rng, Index n1, Index n2, Index p, double shift) {
  const Index n = n1 + n2;
  Matrix x = testing_support::random_matrix(rng, n, p);
  Matrix u(n, 1);
  for (Index i = 0; i < n; ++i) u(i, 0) = rng.uniform();
  std::vector<ClassLabel> labels(static_cast<std::size_t>(n), ClassLabel::Y);
  for (Index i = 0; i < n1; ++i) {
    labels[static_cast<std::size_t>(i)] = ClassLabel::X;
    x(i, 0) += shift;
  }
  return DataSet(x, u, labels);
}

}  // namespace

TEST_CASE("static LPD is the huge-bandwidth limit of DLPD") {
  Rng rng(RngSeed{31});
  const DataSet data = static_data(rng, 40, 35, 6, 1.5);
  const double lambda = 0.2;
  const StaticLpdModel lpd = static_lpd_from_data(data, lambda);
  REQUIRE(lpd.solution().optimal());
  const Bandwidth huge = Bandwidth::uniform(1, 1e6);
  const DlpdModel dlpd(data, huge, huge, KernelSpec::epanechnikov(), lambda);
  for (double u : {0.1, 0.5, 0.9}) {
    const Vector b = dlpd.beta_hat(CovariatePoint{u});
    CHECK((b - lpd.beta_hat()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("static LPD moments use class-size weights") {
  Rng rng(RngSeed{32});
  const DataSet data = static_data(rng, 10, 30, 3, 0.0);
  const StaticLpdModel lpd = static_lpd_from_data(data, 10.0);
  const Matrix x = data.class_features(ClassLabel::X);
  const Matrix y = data.class_features(ClassLabel::Y);
  const Matrix cx = x.rowwise() - x.colwise().mean();
  const Matrix cy = y.rowwise() - y.colwise().mean();
  const Matrix want = (cx.transpose() * cx + cy.transpose() * cy) / 40.0;
  CHECK((lpd.sigma() - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((lpd.mu_x() - x.colwise().mean().transpose()).cwiseAbs().maxCoeff() < 1e-14);
  // lambda above |delta|_inf: zero direction, everything goes to X.
  CHECK(lpd.beta_hat().cwiseAbs().maxCoeff() == 0.0);
  CHECK(lpd.classify(Vector::Constant(3, -5.0)) == ClassLabel::X);
}

TEST_CASE("two one-point classes give a zero direction") {
  Matrix x(2, 2);
  x << 1.0, 2.0, -1.0, 0.5;
  Matrix u(2, 1);
  u << 0.2, 0.7;
  const DataSet data(x, u, {ClassLabel::X, ClassLabel::Y});
  const StaticLpdModel lpd = static_lpd_from_data(data, 2.0);
  CHECK(lpd.sigma().cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(lpd.solution().optimal());
  CHECK(lpd.beta_hat().cwiseAbs().maxCoeff() == 0.0);
  // Below |delta|_inf the program is infeasible with a zero covariance.
  const StaticLpdModel tight = static_lpd_from_data(data, 1.0);
  CHECK_FALSE(tight.solution().optimal());
  CHECK_THROWS_AS(tight.score(Vector::Zero(2)), Error);
}

TEST_CASE("static LPD ignores covariates") {
  Rng rng(RngSeed{33});
  const DataSet data = static_data(rng, 30, 30, 5, 2.0);
  const StaticLpdFit fit = fit_static_lpd(data);
  REQUIRE(fit.grid.size() == 5);
  REQUIRE(fit.cv_scores.size() == 5);
  // The model has no covariate input at all; scoring the same feature vector
  // repeatedly is stable.
  const Vector z = testing_support::random_vector(rng, 5);
  const ClassLabel first = fit.model.classify(z);
  for (int r = 0; r < 10; ++r) CHECK(fit.model.classify(z) == first);
  CHECK(std::find(fit.grid.begin(), fit.grid.end(), fit.model.lambda()) != fit.grid.end());
}

TEST_CASE("static LPD on Model 1 matches the reported error level") {
  std::vector<double> errs;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    ModelSpec spec;
    spec.id = ModelId::M1;
    spec.p = 50;
    spec.seed = RngSeed{s};
    const DataSet train = sample_dataset(spec);
    const DataSet test = sample_test_dataset(spec, 500, 500);
    const StaticLpdFit fit = fit_static_lpd(train);
    double wrong = 0.0;
    for (Index i = 0; i < test.size(); ++i) {
      if (fit.model.classify(test.features().row(i).transpose()) != test.label(i)) wrong += 1.0;
    }
    errs.push_back(wrong / static_cast<double>(test.size()));
  }
  std::sort(errs.begin(), errs.end());
  const double median = 0.5 * (errs[4] + errs[5]);
  CHECK(std::abs(median - 0.105) <= 0.06);
}

TEST_CASE("knn examples") {
  Matrix x(5, 2);
  x << 0, 0, 0.1, 0, 0, 0.1, 5, 5, 5.1, 5;
  Matrix u = Matrix::Zero(5, 1);
  const DataSet data(x, u, {ClassLabel::X, ClassLabel::X, ClassLabel::X, ClassLabel::Y, ClassLabel::Y});
  // k = 1 recovers each training label.
  for (Index i = 0; i < 5; ++i) CHECK(knn_classify(data, x.row(i).transpose(), 1) == data.label(i));
  // k = n: global majority.
  CHECK(knn_classify(data, Vector::Constant(2, 5.0), 5) == ClassLabel::X);
  // Separated clusters.
  for (Index k : {1, 3}) {
    CHECK(knn_classify(data, Vector::Constant(2, 0.05), k) == ClassLabel::X);
    CHECK(knn_classify(data, Vector::Constant(2, 5.05), k) == ClassLabel::Y);
  }
  // Even vote: ties go to X.
  CHECK(knn_classify(data, Vector::Constant(2, 5.0), 4) == ClassLabel::X);
  const auto batch = knn_classify_batch(data, x, 1);
  for (Index i = 0; i < 5; ++i) CHECK(batch[static_cast<std::size_t>(i)] == data.label(i));
}

TEST_CASE("knn with k = 1 has zero training error") {
  Rng rng(RngSeed{34});
  const DataSet data = static_data(rng, 25, 25, 4, 0.5);
  const auto pred = knn_classify_batch(data, data.features(), 1);
  for (Index i = 0; i < data.size(); ++i) CHECK(pred[static_cast<std::size_t>(i)] == data.label(i));
}

TEST_CASE("knn k selection") {
  Rng rng(RngSeed{35});
  const DataSet data = static_data(rng, 30, 30, 3, 3.0);
  const KnnSelection sel = select_knn_k(data);
  REQUIRE(!sel.grid.empty());
  CHECK(sel.grid.front() == 1);
  CHECK(sel.grid.back() == 25);
  for (Index k : sel.grid) CHECK(k % 2 == 1);
  CHECK(sel.k % 2 == 1);
  const KnnSelection again = select_knn_k(data);
  CHECK(again.k == sel.k);
  CHECK(again.cv_scores == sel.cv_scores);
}
