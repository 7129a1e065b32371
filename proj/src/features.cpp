#include "mbal/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mbal/errors.hpp"

namespace mbal {

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::identity: return "identity";
    case FeatureKind::interactions: return "interactions";
    case FeatureKind::moments2: return "moments2";
    case FeatureKind::kernel_gaussian: return "kernel_gaussian";
  }
  return "unknown";
}

double median_heuristic_bandwidth(MatrixRef covariates) {
  const Index n = covariates.rows();
  if (n < 2)
    throw BandwidthUnresolvable("need at least two rows for the median heuristic");
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      double d = (covariates.row(i) - covariates.row(j)).norm();
      if (d > 0.0) dists.push_back(d);
    }
  if (dists.empty())
    throw BandwidthUnresolvable("all rows identical; bandwidth undefined");
  // Lower median.
  const size_t k = (dists.size() - 1) / 2;
  std::nth_element(dists.begin(), dists.begin() + k, dists.end());
  return dists[k];
}

FeatureMatrix evaluate(const FeatureSpec& spec, const Sample& sample) {
  const Matrix& X = sample.covariates;
  const Index n = X.rows();
  const Index p = X.cols();

  FeatureMatrix fm;
  fm.spec = spec;

  switch (spec.kind) {
    case FeatureKind::identity: {
      fm.values = X;
      break;
    }
    case FeatureKind::interactions: {
      const Index K = p * (p - 1) / 2;
      fm.values.resize(n, K);
      Index c = 0;
      for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k)
          fm.values.col(c++) = X.col(j).cwiseProduct(X.col(k));
      break;
    }
    case FeatureKind::moments2: {
      const Index K = 2 * p + p * (p - 1) / 2;
      fm.values.resize(n, K);
      fm.values.leftCols(p) = X;
      fm.values.middleCols(p, p) = X.array().square().matrix();
      Index c = 2 * p;
      for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k)
          fm.values.col(c++) = X.col(j).cwiseProduct(X.col(k));
      break;
    }
    case FeatureKind::kernel_gaussian: {
      double sigma;
      if (spec.bandwidth) {
        sigma = *spec.bandwidth;
        if (!(sigma > 0.0) || !std::isfinite(sigma))
          throw ValidationError("kernel bandwidth must be positive and finite");
      } else {
        sigma = median_heuristic_bandwidth(X);
      }
      const double inv = 1.0 / (2.0 * sigma * sigma);
      Vector sq = X.rowwise().squaredNorm();
      Matrix G = X * X.transpose();
      fm.values.resize(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          double d2 = sq[i] + sq[j] - 2.0 * G(i, j);
          fm.values(i, j) = std::exp(-std::max(d2, 0.0) * inv);
        }
      break;
    }
  }

  if (!fm.values.allFinite())
    throw NumericalFailure("feature evaluation produced non-finite values");
  fm.pooled_mean = fm.values.colwise().mean();
  return fm;
}

}  // namespace mbal
