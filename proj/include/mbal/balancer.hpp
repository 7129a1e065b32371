#pragma once

#include <optional>
#include <vector>

#include "mbal/dataset.hpp"
#include "mbal/features.hpp"
#include "mbal/metric.hpp"
#include "mbal/solver.hpp"
#include "mbal/types.hpp"

namespace mbal {

enum class BalanceVariant { standard, normalized };

// Dual problem for one treatment group: rows of Z are
// z_i = root * (Phi(X_i) - target) over the group's members, in index order.
// The default target is the pooled feature mean.
struct DualProblem {
  Matrix Z;
  double delta = 0.0;
  int group = 1;
  BalanceVariant variant = BalanceVariant::standard;
  std::vector<Index> members;  // sample indices behind the rows of Z
};

DualProblem make_dual_problem(
    const FeatureMatrix& features, const Sample& sample, int group,
    const MetricFactor& metric, double delta,
    BalanceVariant variant = BalanceVariant::standard,
    const std::optional<Vector>& target = std::nullopt);

// Entropy dual for the standard variant:
//   value = sum_i exp(theta'z_i - 1) + sqrt(delta) * |theta|_2.
// Exponents are clamped at +700; the clamped flag reports whether any term
// was clamped at this theta.  For theta = 0 only the smooth part enters the
// gradient.
struct DualEval {
  double value = 0.0;
  Vector gradient;
  bool clamped = false;
};

DualEval dual_objective(const DualProblem& problem, VectorRef theta);

// True iff 0 lies in the subdifferential at theta = 0, i.e.
// |sum_i e^{-1} z_i|_2 <= sqrt(delta); the optimum is then uniform weights.
bool origin_optimality(const DualProblem& problem);

struct BalanceSolution {
  Vector theta;
  Vector weights_unnormalized;  // per group member, index order
  Vector weights;               // normalized, sums to 1 within the group
  double delta = 0.0;
  int group = 1;
  SolveStatus solver_status = SolveStatus::Converged;
  bool at_origin = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<Index> members;

  // Scatters the normalized weights into a length-n vector (zeros outside
  // the group).
  Vector full_weights(Index n) const;
};

// Solves the standard entropy dual for one group and recovers the weights
// w_i = exp(theta'z_i - 1), normalized in log space.
BalanceSolution solve_group(
    const FeatureMatrix& features, const Sample& sample, int group,
    const MetricFactor& metric, double delta,
    const SolverOptions& options = {},
    const std::optional<Vector>& target = std::nullopt);

// Normalization-constrained variant: minimizes
//   logsumexp_i(theta'z_i) + sqrt(delta)*|theta|_2
// whose weights softmax(theta'z) need no further normalization; at delta=0
// this is entropy balancing.  Throws Infeasible when the iterates diverge
// (|theta| exceeding 1e6 while still descending).
BalanceSolution solve_group_normalized(
    const FeatureMatrix& features, const Sample& sample, int group,
    const MetricFactor& metric, double delta,
    const SolverOptions& options = {},
    const std::optional<Vector>& target = std::nullopt);

// Combines per-group normalized weights into one length-n vector.
Vector combine_weights(const Sample& sample, const BalanceSolution& treated,
                       const BalanceSolution& control);

}  // namespace mbal
