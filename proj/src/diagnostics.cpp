#include "mbal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mbal/errors.hpp"

namespace mbal {

namespace {

struct GroupMoments {
  Vector mean1, mean0;   // group means of the features
  Vector var1, var0;     // unbiased group variances
  Index n1 = 0, n0 = 0;
};

GroupMoments feature_moments(const FeatureMatrix& features,
                             const Sample& sample) {
  const Matrix& V = features.values;
  const Index K = V.cols();
  GroupMoments m;
  m.mean1 = Vector::Zero(K);
  m.mean0 = Vector::Zero(K);
  m.var1 = Vector::Zero(K);
  m.var0 = Vector::Zero(K);
  for (Index i = 0; i < sample.n(); ++i) {
    if (sample.treatment[i] == 1) {
      ++m.n1;
      m.mean1 += V.row(i);
    } else {
      ++m.n0;
      m.mean0 += V.row(i);
    }
  }
  if (m.n1 < 2 || m.n0 < 2)
    throw GroupTooSmall("each group needs at least 2 subjects");
  m.mean1 /= static_cast<double>(m.n1);
  m.mean0 /= static_cast<double>(m.n0);
  for (Index i = 0; i < sample.n(); ++i) {
    if (sample.treatment[i] == 1)
      m.var1 += (V.row(i).transpose() - m.mean1).array().square().matrix();
    else
      m.var0 += (V.row(i).transpose() - m.mean0).array().square().matrix();
  }
  m.var1 /= static_cast<double>(m.n1 - 1);
  m.var0 /= static_cast<double>(m.n0 - 1);
  return m;
}

// group = -1 validates both groups, otherwise only the given one.
void check_weights(const Sample& sample, VectorRef weights, int group = -1) {
  if (weights.size() != sample.n())
    throw DimensionMismatch("weights must have one entry per subject");
  double sum1 = 0.0, sum0 = 0.0;
  for (Index i = 0; i < sample.n(); ++i) {
    if (weights[i] < 0.0)
      throw WeightSumViolation("weights must be nonnegative");
    (sample.treatment[i] == 1 ? sum1 : sum0) += weights[i];
  }
  if ((group != 0 && std::abs(sum1 - 1.0) > 1e-6) ||
      (group != 1 && std::abs(sum0 - 1.0) > 1e-6))
    throw WeightSumViolation("weights must sum to 1 within the group");
}

Vector asmd_impl(const FeatureMatrix& features, const Sample& sample,
                 const Vector& num1, const Vector& num0) {
  GroupMoments m = feature_moments(features, sample);
  const Index K = features.K();
  Vector out(K);
  for (Index k = 0; k < K; ++k) {
    const double denom = std::sqrt((m.var1[k] + m.var0[k]) / 2.0);
    const double diff = std::abs(num1[k] - num0[k]);
    if (denom == 0.0) {
      if (diff == 0.0) {
        out[k] = 0.0;
        continue;
      }
      throw ZeroDispersion(static_cast<long>(k));
    }
    out[k] = diff / denom;
  }
  return out;
}

Vector weighted_group_mean(const FeatureMatrix& features, const Sample& sample,
                           VectorRef weights, int t) {
  Vector mean = Vector::Zero(features.K());
  for (Index i = 0; i < sample.n(); ++i)
    if (sample.treatment[i] == t)
      mean += weights[i] * features.values.row(i).transpose();
  return mean;
}

}  // namespace

Vector uniform_weights(const Sample& sample) {
  const double n1 = static_cast<double>(sample.group_size(1));
  const double n0 = static_cast<double>(sample.group_size(0));
  Vector w(sample.n());
  for (Index i = 0; i < sample.n(); ++i)
    w[i] = sample.treatment[i] == 1 ? 1.0 / n1 : 1.0 / n0;
  return w;
}

Vector asmd(const FeatureMatrix& features, const Sample& sample) {
  // Shares the weighted code path so weighted_asmd with uniform weights
  // reproduces it bit-exactly.
  return weighted_asmd(features, sample, uniform_weights(sample));
}

Vector weighted_asmd(const FeatureMatrix& features, const Sample& sample,
                     VectorRef weights) {
  check_weights(sample, weights);
  Vector num1 = weighted_group_mean(features, sample, weights, 1);
  Vector num0 = weighted_group_mean(features, sample, weights, 0);
  return asmd_impl(features, sample, num1, num0);
}

double mahalanobis_distance(const FeatureMatrix& features, const Sample& sample,
                            const RidgePolicy& policy) {
  GroupMoments m = feature_moments(features, sample);
  MetricFactor w2 = build_metric(MetricKind::W2_full,
                                 pooled_covariance(features, sample), policy);
  return (w2.root * (m.mean1 - m.mean0)).squaredNorm();
}

double mim(const FeatureMatrix& features, const Sample& sample,
           VectorRef weights, const RidgePolicy& policy) {
  check_weights(sample, weights);
  Vector d = weighted_group_mean(features, sample, weights, 1) -
             weighted_group_mean(features, sample, weights, 0);
  MetricFactor w2 = build_metric(MetricKind::W2_full,
                                 pooled_covariance(features, sample), policy);
  return (w2.root * d).squaredNorm();
}

double gmim(const FeatureMatrix& features, const Sample& sample, int group,
            VectorRef weights, const MetricFactor& metric,
            const std::optional<Vector>& target) {
  if (metric.dim() != features.K())
    throw DimensionMismatch("metric dimension does not match feature count");
  check_weights(sample, weights, group);
  const Vector& t = target ? *target : features.pooled_mean;
  Vector d = weighted_group_mean(features, sample, weights, group) - t;
  return (metric.root * d).squaredNorm();
}

AsmdSummary summarize(VectorRef asmd_values) {
  if (asmd_values.size() == 0) throw EmptyVector("empty ASMD vector");
  AsmdSummary s;
  s.max = asmd_values.maxCoeff();
  s.mean = asmd_values.mean();
  std::vector<double> sorted(asmd_values.data(),
                             asmd_values.data() + asmd_values.size());
  const size_t k = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
  s.median = sorted[k];
  return s;
}

DiagnosticsReport diagnostics_report(const FeatureMatrix& features,
                                     const Sample& sample,
                                     const std::optional<Vector>& weights,
                                     const MetricFactor& metric,
                                     const std::optional<Vector>& target) {
  DiagnosticsReport report;
  Vector w = weights ? *weights : uniform_weights(sample);
  report.weights_used = weights ? "supplied" : "uniform";
  report.asmd = weights ? weighted_asmd(features, sample, w)
                        : asmd(features, sample);
  AsmdSummary s = summarize(report.asmd);
  report.asmd_max = s.max;
  report.asmd_mean = s.mean;
  report.asmd_median = s.median;
  report.md = mahalanobis_distance(features, sample);
  report.mim = mim(features, sample, w);
  report.gmim_treated = gmim(features, sample, 1, w, metric, target);
  report.gmim_control = gmim(features, sample, 0, w, metric, target);
  return report;
}

}  // namespace mbal
