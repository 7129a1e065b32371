#pragma once

#include <optional>
#include <string>

#include "mbal/dataset.hpp"
#include "mbal/types.hpp"

namespace mbal {

enum class FeatureKind { identity, interactions, moments2, kernel_gaussian };

struct FeatureSpec {
  FeatureKind kind = FeatureKind::identity;
  // Gaussian kernel bandwidth: unset -> median heuristic.
  std::optional<double> bandwidth;

  static FeatureSpec identity() { return {FeatureKind::identity, {}}; }
  static FeatureSpec interactions() { return {FeatureKind::interactions, {}}; }
  static FeatureSpec moments2() { return {FeatureKind::moments2, {}}; }
  static FeatureSpec kernel_gaussian(
      std::optional<double> bandwidth = std::nullopt) {
    return {FeatureKind::kernel_gaussian, bandwidth};
  }
};

std::string to_string(FeatureKind kind);

// Evaluated basis functions: n x K matrix plus the pooled column mean.
struct FeatureMatrix {
  Matrix values;       // n x K
  Vector pooled_mean;  // length K
  FeatureSpec spec;

  Index n() const { return values.rows(); }
  Index K() const { return values.cols(); }
};

// Column layouts: identity -> K=p raw covariates; interactions -> all
// products x_j*x_k for j<k in lexicographic (j,k) order; moments2 ->
// [x, x^2, interactions]; kernel_gaussian -> K=n with column i holding
// exp(-|x - x_i|^2 / (2 sigma^2)).
FeatureMatrix evaluate(const FeatureSpec& spec, const Sample& sample);

// Median of pairwise Euclidean distances over all i<j, zero distances
// excluded; lower median for even counts.
double median_heuristic_bandwidth(MatrixRef covariates);

}  // namespace mbal
