#include "mbal/metric.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "mbal/errors.hpp"

namespace mbal {

std::string to_string(MetricKind kind) {
  return kind == MetricKind::W1_diagonal ? "w1" : "w2";
}

Matrix pooled_covariance(const FeatureMatrix& features, const Sample& sample) {
  const Matrix& V = features.values;
  const Index K = V.cols();
  Matrix pooled = Matrix::Zero(K, K);
  for (int t : {0, 1}) {
    GroupView g = group_view(sample, t);
    const Index m = g.size();
    if (m < 2) throw GroupTooSmall("group needs at least 2 subjects");
    Matrix rows(m, K);
    for (Index i = 0; i < m; ++i) rows.row(i) = V.row(g.indices[i]);
    Vector mean = rows.colwise().mean();
    rows.rowwise() -= mean.transpose();
    pooled += rows.transpose() * rows / (2.0 * static_cast<double>(m - 1));
  }
  return pooled;
}

MetricFactor build_metric(MetricKind kind, MatrixRef pooled_cov,
                          const RidgePolicy& policy) {
  const Index K = pooled_cov.rows();
  if (pooled_cov.cols() != K)
    throw DimensionMismatch("pooled covariance must be square");
  const double scale = pooled_cov.cwiseAbs().maxCoeff();
  if ((pooled_cov - pooled_cov.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(scale, 1.0))
    throw NotSymmetric("pooled covariance is not symmetric");

  MetricFactor mf;
  mf.kind = kind;
  mf.pooled_cov = pooled_cov;

  if (kind == MetricKind::W1_diagonal) {
    const Vector diag = pooled_cov.diagonal();
    const double dmax = diag.maxCoeff();
    if (!(dmax > 0.0))
      throw FactorizationFailed("pooled covariance diagonal is zero");
    const double floor = 1e-12 * dmax;
    mf.root = Matrix::Zero(K, K);
    for (Index k = 0; k < K; ++k)
      mf.root(k, k) = 1.0 / std::sqrt(std::max(diag[k], floor));
    return mf;
  }

  const double tr_over_k = pooled_cov.trace() / static_cast<double>(K);
  for (double mult : policy.multipliers) {
    const double lambda = mult * tr_over_k;
    Matrix S = pooled_cov;
    S.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) continue;
    Matrix L = llt.matrixL();
    // root = L^{-1}, so root^T root = (L L^T)^{-1} = (S + lambda I)^{-1}.
    Matrix inv_l = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(K, K));
    if (!inv_l.allFinite()) continue;
    mf.root = inv_l;
    mf.ridge_used = lambda;
    return mf;
  }
  throw FactorizationFailed("Cholesky failed for all ridge values");
}

MetricFactor build_metric(MetricKind kind, const FeatureMatrix& features,
                          const Sample& sample, const RidgePolicy& policy) {
  return build_metric(kind, pooled_covariance(features, sample), policy);
}

}  // namespace mbal
