#pragma once

#include <optional>
#include <string>

#include "mbal/dataset.hpp"
#include "mbal/features.hpp"
#include "mbal/metric.hpp"
#include "mbal/types.hpp"

namespace mbal {

// Per-feature |mean_1 - mean_0| / sqrt((s1^2 + s0^2) / 2) with unbiased
// group variances.  Zero dispersion with equal means gives 0; with differing
// means it is an error.
Vector asmd(const FeatureMatrix& features, const Sample& sample);

// Weighted group means in the numerator, unweighted variances in the
// denominator.  `weights` has length n and sums to 1 within each group.
Vector weighted_asmd(const FeatureMatrix& features, const Sample& sample,
                     VectorRef weights);

// Squared Mahalanobis distance between group feature means under the pooled
// covariance.
double mahalanobis_distance(const FeatureMatrix& features, const Sample& sample,
                            const RidgePolicy& policy = {});

// Weighted version of the Mahalanobis distance.
double mim(const FeatureMatrix& features, const Sample& sample,
           VectorRef weights, const RidgePolicy& policy = {});

// Generalized Mahalanobis imbalance for one group: d' W d with
// d = weighted group mean - target (pooled mean unless overridden).
double gmim(const FeatureMatrix& features, const Sample& sample, int group,
            VectorRef weights, const MetricFactor& metric,
            const std::optional<Vector>& target = std::nullopt);

struct AsmdSummary {
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;  // lower median for even counts
};

AsmdSummary summarize(VectorRef asmd_values);

struct DiagnosticsReport {
  Vector asmd;  // weighted when weights were supplied
  double asmd_max = 0.0;
  double asmd_mean = 0.0;
  double asmd_median = 0.0;
  double md = 0.0;
  double mim = 0.0;
  double gmim_treated = 0.0;
  double gmim_control = 0.0;
  std::string weights_used;  // "uniform" or "supplied"

  double gmim_total() const { return gmim_treated + gmim_control; }
};

// Full report.  GMIM uses `metric` (reports use W1 by convention); weights
// default to uniform within each group.
DiagnosticsReport diagnostics_report(
    const FeatureMatrix& features, const Sample& sample,
    const std::optional<Vector>& weights, const MetricFactor& metric,
    const std::optional<Vector>& target = std::nullopt);

// Uniform weights (1/n_t within each group) as a length-n vector.
Vector uniform_weights(const Sample& sample);

}  // namespace mbal
