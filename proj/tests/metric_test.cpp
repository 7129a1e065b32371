#include <doctest.h>

#include <cmath>

#include "mbal/errors.hpp"
#include "mbal/metric.hpp"
#include "test_util.hpp"

using namespace mbal;

TEST_SUITE_BEGIN("metric");

namespace {

Sample two_point_groups() {
  // treated feature values {0, 2}, control {1, 3}; variances 2 and 2.
  Matrix x(4, 1);
  x << 0, 2, 1, 3;
  IntVector t(4);
  t << 1, 1, 0, 0;
  return Sample::make(x, t);
}

}  // namespace

TEST_CASE("pooled covariance of hand-computed 1-D groups") {
  Sample s = two_point_groups();
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Matrix pooled = pooled_covariance(fm, s);
  CHECK(pooled(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("constant features give a zero pooled covariance") {
  Matrix x = Matrix::Ones(6, 2);
  IntVector t(6);
  t << 1, 1, 1, 0, 0, 0;
  Sample s = Sample::make(x, t);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  CHECK(pooled_covariance(fm, s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity pooled covariance gives identity W1 and W2") {
  Matrix s2 = Matrix::Identity(3, 3);
  for (MetricKind kind : {MetricKind::W1_diagonal, MetricKind::W2_full}) {
    MetricFactor mf = build_metric(kind, s2);
    CHECK((mf.weight_matrix() - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK(mf.ridge_used == 0.0);
  }
}

TEST_CASE("W1 root of diag(4, 1) is diag(1/2, 1)") {
  Matrix s2(2, 2);
  s2 << 4, 0, 0, 1;
  MetricFactor mf = build_metric(MetricKind::W1_diagonal, s2);
  CHECK(mf.root(0, 0) == doctest::Approx(0.5));
  CHECK(mf.root(1, 1) == doctest::Approx(1.0));
  CHECK(mf.root(0, 1) == 0.0);
}

TEST_CASE("root reconstructs W within 1e-8 relative Frobenius error") {
  Sample s = testutil::random_sample(60, 5, 31);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Matrix pooled = pooled_covariance(fm, s);
  for (MetricKind kind : {MetricKind::W1_diagonal, MetricKind::W2_full}) {
    MetricFactor mf = build_metric(kind, pooled);
    Matrix w = mf.weight_matrix();
    Matrix recon = mf.root.transpose() * mf.root;
    CHECK((recon - w).norm() <= 1e-8 * w.norm());
  }
}

TEST_CASE("W2 inverts a well-conditioned pooled covariance") {
  Sample s = testutil::random_sample(80, 4, 32);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Matrix pooled = pooled_covariance(fm, s);
  MetricFactor mf = build_metric(MetricKind::W2_full, pooled);
  CHECK(mf.ridge_used == 0.0);
  Matrix prod = mf.weight_matrix() * pooled;
  CHECK((prod - Matrix::Identity(4, 4)).norm() <= 1e-6);
}

TEST_CASE("singular pooled covariance succeeds with a positive ridge") {
  Sample s = testutil::random_sample(40, 3, 33);
  Matrix x(s.n(), 4);
  x.leftCols(3) = s.covariates;
  x.col(3) = s.covariates.col(0);  // exact duplicate column
  Sample dup = Sample::make(x, s.treatment, s.outcome);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), dup);
  MetricFactor mf = build_metric(MetricKind::W2_full, pooled_covariance(fm, dup));
  CHECK(mf.ridge_used > 0.0);
}

TEST_CASE("asymmetric input is rejected") {
  Matrix bad(2, 2);
  bad << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(build_metric(MetricKind::W2_full, bad), NotSymmetric);
}

TEST_CASE("W1 standardizes the pooled variance of each coordinate") {
  Sample s = testutil::random_sample(100, 6, 34);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Matrix pooled = pooled_covariance(fm, s);
  MetricFactor mf = build_metric(MetricKind::W1_diagonal, pooled);
  Matrix standardized = mf.root * pooled * mf.root.transpose();
  for (Index k = 0; k < 6; ++k)
    CHECK(standardized(k, k) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("near-constant diagonal entries are floored, not infinite") {
  Matrix s2(2, 2);
  s2 << 1.0, 0.0, 0.0, 1e-30;
  MetricFactor mf = build_metric(MetricKind::W1_diagonal, s2);
  CHECK(std::isfinite(mf.root(1, 1)));
  CHECK(mf.root(1, 1) == doctest::Approx(1.0 / std::sqrt(1e-12)));
}

TEST_SUITE_END();
