#include "mbal/balancer.hpp"

#include <cmath>

#include "mbal/errors.hpp"
#include "mbal/logsumexp.hpp"

namespace mbal {

namespace {

constexpr double kExpClamp = 700.0;
constexpr double kWarmStartStep = 1e-3;
constexpr double kThetaNormCap = 1e6;

// Thrown from inside the normalized-variant callback when the iterates run
// away; caught in solve_group_normalized and reported as Infeasible.
struct DivergenceSignal {};

}  // namespace

DualProblem make_dual_problem(const FeatureMatrix& features,
                              const Sample& sample, int group,
                              const MetricFactor& metric, double delta,
                              BalanceVariant variant,
                              const std::optional<Vector>& target) {
  if (delta < 0.0) throw ValidationError("delta must be nonnegative");
  if (metric.dim() != features.K())
    throw DimensionMismatch("metric dimension does not match feature count");
  const Vector& t = target ? *target : features.pooled_mean;
  if (t.size() != features.K())
    throw DimensionMismatch("target length does not match feature count");

  GroupView g = group_view(sample, group);
  DualProblem problem;
  problem.delta = delta;
  problem.group = group;
  problem.variant = variant;
  problem.members = g.indices;
  const Index m = g.size();
  Matrix centered(m, features.K());
  for (Index i = 0; i < m; ++i)
    centered.row(i) = features.values.row(g.indices[i]) - t.transpose();
  problem.Z = centered * metric.root.transpose();
  return problem;
}

DualEval dual_objective(const DualProblem& problem, VectorRef theta) {
  if (problem.variant != BalanceVariant::standard)
    throw ValidationError("dual_objective is for the standard variant");
  if (!theta.allFinite())
    throw NumericalFailure("theta contains non-finite entries");

  Vector a = problem.Z * theta;
  a.array() -= 1.0;

  DualEval eval;
  eval.gradient = Vector::Zero(theta.size());
  Vector w(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    double e = a[i];
    if (e > kExpClamp) {
      e = kExpClamp;
      eval.clamped = true;
    }
    w[i] = std::exp(e);
  }
  eval.value = w.sum();
  eval.gradient = problem.Z.transpose() * w;

  const double norm = theta.norm();
  if (norm > 0.0) {
    const double sqrt_delta = std::sqrt(problem.delta);
    eval.value += sqrt_delta * norm;
    eval.gradient += (sqrt_delta / norm) * theta;
  }
  if (!std::isfinite(eval.value) || !eval.gradient.allFinite())
    throw NumericalFailure("dual objective is non-finite");
  return eval;
}

bool origin_optimality(const DualProblem& problem) {
  const double e_inv = std::exp(-1.0);
  Vector g = e_inv * (problem.Z.colwise().sum().transpose());
  return g.norm() <= std::sqrt(problem.delta);
}

Vector BalanceSolution::full_weights(Index n) const {
  Vector w = Vector::Zero(n);
  for (size_t i = 0; i < members.size(); ++i)
    w[members[i]] = weights[static_cast<Index>(i)];
  return w;
}

namespace {

BalanceSolution uniform_solution(const DualProblem& problem, Index dim) {
  BalanceSolution sol;
  sol.theta = Vector::Zero(dim);
  const Index m = problem.Z.rows();
  sol.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
  sol.weights_unnormalized =
      problem.variant == BalanceVariant::standard
          ? Vector::Constant(m, std::exp(-1.0))
          : sol.weights;
  sol.delta = problem.delta;
  sol.group = problem.group;
  sol.solver_status = SolveStatus::Converged;
  sol.at_origin = true;
  sol.members = problem.members;
  return sol;
}

Vector standard_warm_start(const DualProblem& problem) {
  Vector g = std::exp(-1.0) * (problem.Z.colwise().sum().transpose());
  const double norm = g.norm();
  return (-kWarmStartStep / norm) * g;
}

}  // namespace

BalanceSolution solve_group(const FeatureMatrix& features, const Sample& sample,
                            int group, const MetricFactor& metric, double delta,
                            const SolverOptions& options,
                            const std::optional<Vector>& target) {
  DualProblem problem = make_dual_problem(features, sample, group, metric,
                                          delta, BalanceVariant::standard,
                                          target);
  const Index K = features.K();
  if (origin_optimality(problem)) return uniform_solution(problem, K);

  auto objective = [&problem](VectorRef theta, Vector& grad) {
    DualEval eval = dual_objective(problem, theta);
    grad = eval.gradient;
    return eval.value;
  };
  SolveResult res = minimize(objective, standard_warm_start(problem), options);

  DualEval at_opt = dual_objective(problem, res.argmin);
  if (at_opt.clamped && res.status == SolveStatus::Converged)
    throw NumericalFailure("exponent clamped at a converged iterate");

  BalanceSolution sol;
  sol.theta = res.argmin;
  sol.delta = delta;
  sol.group = group;
  sol.solver_status = res.status;
  sol.at_origin = false;
  sol.iterations = res.iterations;
  sol.grad_norm = res.grad_norm;
  sol.members = problem.members;

  Vector eta = problem.Z * sol.theta;  // log w_i + 1
  sol.weights_unnormalized = (eta.array() - 1.0).exp();
  sol.weights = softmax(eta);
  return sol;
}

BalanceSolution solve_group_normalized(const FeatureMatrix& features,
                                       const Sample& sample, int group,
                                       const MetricFactor& metric, double delta,
                                       const SolverOptions& options,
                                       const std::optional<Vector>& target) {
  DualProblem problem = make_dual_problem(features, sample, group, metric,
                                          delta, BalanceVariant::normalized,
                                          target);
  const Index K = features.K();
  const double sqrt_delta = std::sqrt(delta);

  // Subgradient condition at the origin: the smooth part's gradient is the
  // group mean of z.
  Vector mean_z = problem.Z.colwise().mean().transpose();
  if (mean_z.norm() <= sqrt_delta) return uniform_solution(problem, K);

  auto objective = [&problem, sqrt_delta](VectorRef theta, Vector& grad) {
    if (theta.norm() > kThetaNormCap) throw DivergenceSignal{};
    Vector eta = problem.Z * theta;
    const double lse = log_sum_exp(eta);
    Vector p = softmax(eta);
    grad = problem.Z.transpose() * p;
    double value = lse;
    const double norm = theta.norm();
    if (norm > 0.0) {
      value += sqrt_delta * norm;
      grad += (sqrt_delta / norm) * theta;
    }
    return value;
  };

  Vector x0 = (-kWarmStartStep / mean_z.norm()) * mean_z;
  SolveResult res;
  try {
    res = minimize(objective, x0, options);
  } catch (const DivergenceSignal&) {
    throw Infeasible(
        "normalized balancing diverged; the primal problem appears infeasible "
        "at delta = " + std::to_string(delta));
  }

  BalanceSolution sol;
  sol.theta = res.argmin;
  sol.delta = delta;
  sol.group = group;
  sol.solver_status = res.status;
  sol.at_origin = false;
  sol.iterations = res.iterations;
  sol.grad_norm = res.grad_norm;
  sol.members = problem.members;
  sol.weights = softmax(problem.Z * sol.theta);
  sol.weights_unnormalized = sol.weights;
  return sol;
}

Vector combine_weights(const Sample& sample, const BalanceSolution& treated,
                       const BalanceSolution& control) {
  return treated.full_weights(sample.n()) + control.full_weights(sample.n());
}

}  // namespace mbal
