#pragma once

#include <string>
#include <vector>

#include "mbal/dataset.hpp"
#include "mbal/features.hpp"
#include "mbal/types.hpp"

namespace mbal {

enum class MetricKind { W1_diagonal, W2_full };

std::string to_string(MetricKind kind);

// Ridge multipliers tried in order for the W2 Cholesky; the actual ridge is
// multiplier * trace(S) / K.
struct RidgePolicy {
  std::vector<double> multipliers = {0.0, 1e-10, 1e-8, 1e-6, 1e-4};
};

// Weight matrix W together with a root satisfying W = root^T * root.
struct MetricFactor {
  MetricKind kind;
  Matrix pooled_cov;  // S = (Sigma1 + Sigma0) / 2
  Matrix root;        // K x K
  double ridge_used = 0.0;

  Index dim() const { return root.cols(); }
  Matrix weight_matrix() const { return root.transpose() * root; }
};

// (Sigma1 + Sigma0)/2 with unbiased within-group covariances of the features.
Matrix pooled_covariance(const FeatureMatrix& features, const Sample& sample);

// W1: diagonal inverse of diag(S), entries floored at 1e-12 * max diag.
// W2: inverse of S via Cholesky, escalating the ridge until it factors.
MetricFactor build_metric(MetricKind kind, MatrixRef pooled_cov,
                          const RidgePolicy& policy = {});

MetricFactor build_metric(MetricKind kind, const FeatureMatrix& features,
                          const Sample& sample, const RidgePolicy& policy = {});

}  // namespace mbal
