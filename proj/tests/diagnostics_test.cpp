#include <doctest.h>

#include <cmath>

#include "mbal/balancer.hpp"
#include "mbal/diagnostics.hpp"
#include "mbal/errors.hpp"
#include "test_util.hpp"

using namespace mbal;

TEST_SUITE_BEGIN("diagnostics");

namespace {

Sample hand_sample() {
  // treated feature values {0, 2}, control {1, 3}.
  Matrix x(4, 1);
  x << 0, 2, 1, 3;
  IntVector t(4);
  t << 1, 1, 0, 0;
  return Sample::make(x, t);
}

}  // namespace

TEST_CASE("asmd hand evaluation: |1-2|/sqrt(2)") {
  Sample s = hand_sample();
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Vector a = asmd(fm, s);
  CHECK(a[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("identical group values give zero asmd") {
  Matrix x(6, 2);
  x << 1, 4, 2, 5, 3, 6, 1, 4, 2, 5, 3, 6;
  IntVector t(6);
  t << 1, 1, 1, 0, 0, 0;
  Sample s = Sample::make(x, t);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  CHECK(asmd(fm, s).maxCoeff() == 0.0);
}

TEST_CASE("zero dispersion: equal means give 0, differing means throw") {
  Matrix x(4, 1);
  x << 2, 2, 2, 2;
  IntVector t(4);
  t << 1, 1, 0, 0;
  Sample s = Sample::make(x, t);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  CHECK(asmd(fm, s)[0] == 0.0);

  Matrix x2(4, 1);
  x2 << 2, 2, 3, 3;
  Sample s2 = Sample::make(x2, t);
  FeatureMatrix fm2 = evaluate(FeatureSpec::identity(), s2);
  CHECK_THROWS_AS(asmd(fm2, s2), ZeroDispersion);
}

TEST_CASE("weighted asmd with uniform weights equals asmd") {
  Sample s = testutil::random_sample(40, 5, 9);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Vector u = uniform_weights(s);
  Vector a = asmd(fm, s);
  Vector wa = weighted_asmd(fm, s, u);
  CHECK((a - wa).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("weight sum violations are rejected") {
  Sample s = testutil::random_sample(20, 2, 10);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Vector w = uniform_weights(s);
  w[0] += 0.5;
  CHECK_THROWS_AS(weighted_asmd(fm, s, w), WeightSumViolation);
  Vector neg = uniform_weights(s);
  neg[0] = -neg[0];
  CHECK_THROWS_AS(weighted_asmd(fm, s, neg), WeightSumViolation);
}

TEST_CASE("asmd is invariant under per-feature affine maps") {
  Sample s = testutil::random_sample(50, 4, 11);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Vector base = asmd(fm, s);

  Matrix x = s.covariates;
  Vector scale(4), shift(4);
  scale << 2.0, -3.0, 0.5, 10.0;
  shift << 1.0, -7.0, 0.0, 100.0;
  for (Index j = 0; j < 4; ++j)
    x.col(j) = scale[j] * x.col(j) + Vector::Constant(x.rows(), shift[j]);
  Sample sm = Sample::make(x, s.treatment, s.outcome);
  FeatureMatrix fmm = evaluate(FeatureSpec::identity(), sm);
  CHECK((asmd(fmm, sm) - base).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("mahalanobis distance: hand case and affine invariance") {
  // 1-D means 1 vs 2, pooled variance 2 -> MD = 1/2.
  Matrix x(4, 1);
  x << 0, 2, 1, 3;
  IntVector t(4);
  t << 1, 1, 0, 0;
  Sample s = Sample::make(x, t);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  CHECK(mahalanobis_distance(fm, s) == doctest::Approx(0.5));

  Sample r = testutil::random_sample(60, 3, 12);
  FeatureMatrix fr = evaluate(FeatureSpec::identity(), r);
  double base = mahalanobis_distance(fr, r);
  Matrix a(3, 3);
  a << 1, 2, 0, 0, 1, -1, 3, 0, 1;
  Sample rt = Sample::make(r.covariates * a.transpose(), r.treatment, r.outcome);
  FeatureMatrix frt = evaluate(FeatureSpec::identity(), rt);
  CHECK(mahalanobis_distance(frt, rt) == doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("equal group means give zero distance") {
  Matrix x(4, 2);
  x << -1, 0, 1, 0, -2, 0.5, 2, -0.5;
  IntVector t(4);
  t << 1, 1, 0, 0;
  Sample s = Sample::make(x, t);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  CHECK(mahalanobis_distance(fm, s) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mim with uniform weights equals the mahalanobis distance") {
  Sample s = testutil::random_sample(50, 4, 13);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  CHECK(mim(fm, s, uniform_weights(s)) ==
        doctest::Approx(mahalanobis_distance(fm, s)).epsilon(1e-10));
}

TEST_CASE("triangle bound: sqrt(MIM) <= sqrt(GMIM1) + sqrt(GMIM0) under W2") {
  for (std::uint64_t seed : {20u, 21u, 22u, 23u}) {
    Sample s = testutil::random_sample(60, 3, seed);
    FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
    MetricFactor w2 = build_metric(MetricKind::W2_full, fm, s);
    REQUIRE(w2.ridge_used == 0.0);
    // Random normalized weights.
    Rng rng(seed);
    Vector w(s.n());
    double s1 = 0, s0 = 0;
    for (Index i = 0; i < s.n(); ++i) {
      w[i] = rng.next_double() + 0.1;
      (s.treatment[i] == 1 ? s1 : s0) += w[i];
    }
    for (Index i = 0; i < s.n(); ++i) w[i] /= s.treatment[i] == 1 ? s1 : s0;

    double lhs = std::sqrt(mim(fm, s, w));
    double rhs = std::sqrt(gmim(fm, s, 1, w, w2)) +
                 std::sqrt(gmim(fm, s, 0, w, w2));
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("gmim hand case: d = 0.5, W = 4 gives 1.0") {
  Matrix x(4, 1);
  x << 3, 2, 0, 1;
  IntVector t(4);
  t << 1, 1, 0, 0;
  Sample s = Sample::make(x, t);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  Matrix pooled(1, 1);
  pooled << 0.25;  // W1 = 4
  MetricFactor w1 = build_metric(MetricKind::W1_diagonal, pooled);
  // All treated weight on the point at 3; target 2.5 makes d = 0.5.
  Vector w(4);
  w << 1.0, 0.0, 0.5, 0.5;
  Vector target(1);
  target << 2.5;
  CHECK(gmim(fm, s, 1, w, w1, target) == doctest::Approx(1.0));
}

TEST_CASE("gmim is zero iff the weighted mean hits the target") {
  Sample s = testutil::random_sample(30, 2, 25);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  MetricFactor w1 = build_metric(MetricKind::W1_diagonal, fm, s);
  Vector w = uniform_weights(s);
  GroupView g = group_view(s, 1);
  Vector treated_mean = Vector::Zero(2);
  for (Index i : g.indices)
    treated_mean += fm.values.row(i).transpose() / double(g.size());
  double val = gmim(fm, s, 1, w, w1, treated_mean);
  CHECK(val == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(gmim(fm, s, 1, w, w1) > 0.0);
}

TEST_CASE("gmim with W2 is invariant under invertible maps of the features") {
  Sample s = testutil::random_sample(70, 3, 26);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  MetricFactor w2 = build_metric(MetricKind::W2_full, fm, s);
  Vector w = uniform_weights(s);
  double base = gmim(fm, s, 1, w, w2);

  Matrix a(3, 3);
  a << 2, 1, 0, 0, 1, 1, 1, 0, 3;
  Sample st = Sample::make(s.covariates * a.transpose(), s.treatment, s.outcome);
  FeatureMatrix fmt = evaluate(FeatureSpec::identity(), st);
  MetricFactor w2t = build_metric(MetricKind::W2_full, fmt, st);
  CHECK(gmim(fmt, st, 1, w, w2t) == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("summaries: max, mean, lower median") {
  Vector v(3);
  v << 0.1, 0.3, 0.2;
  AsmdSummary s = summarize(v);
  CHECK(s.max == doctest::Approx(0.3));
  CHECK(s.mean == doctest::Approx(0.2));
  CHECK(s.median == doctest::Approx(0.2));

  Vector zero = Vector::Zero(5);
  AsmdSummary z = summarize(zero);
  CHECK(z.max == 0.0);
  CHECK(z.mean == 0.0);
  CHECK(z.median == 0.0);

  Vector even(4);
  even << 0.4, 0.1, 0.3, 0.2;
  CHECK(summarize(even).median == doctest::Approx(0.2));  // lower median

  CHECK_THROWS_AS(summarize(Vector(0)), EmptyVector);
}

TEST_CASE("full report wires the pieces together") {
  Sample s = testutil::random_sample(50, 3, 27);
  FeatureMatrix fm = evaluate(FeatureSpec::identity(), s);
  MetricFactor w1 = build_metric(MetricKind::W1_diagonal, fm, s);
  DiagnosticsReport rep = diagnostics_report(fm, s, std::nullopt, w1);
  CHECK(rep.weights_used == "uniform");
  CHECK(rep.asmd_max >= rep.asmd_mean);
  CHECK(rep.mim == doctest::Approx(rep.md).epsilon(1e-10));
  CHECK(rep.gmim_total() == rep.gmim_treated + rep.gmim_control);
}

TEST_SUITE_END();
