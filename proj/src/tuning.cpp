#include "mbal/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbal/errors.hpp"

namespace mbal {

namespace {

// Near-stationary solves are still usable for tuning even when the line
// search stalled short of the gradient tolerance.
constexpr double kUsableGradNorm = 1e-5;

bool solve_usable(const BalanceSolution& sol) {
  return sol.solver_status == SolveStatus::Converged ||
         sol.grad_norm <= kUsableGradNorm;
}

}  // namespace

DeltaGrid DeltaGrid::standard() {
  DeltaGrid g;
  for (int k = 0; k <= 6; ++k) g.values.push_back(std::pow(10.0, -k));
  return g;
}

double fixed_delta_policy() { return 1e-4; }

TuningTrace select_delta(const FeatureMatrix& features, const Sample& sample,
                         int group, const MetricFactor& metric,
                         const DeltaGrid& grid, const SolverOptions& options,
                         const std::optional<Vector>& target) {
  if (grid.values.empty()) throw ValidationError("delta grid is empty");

  TuningTrace trace;
  bool have_best = false;
  double best_gmim = 0.0;

  for (double delta : grid.values) {
    DeltaRecord rec;
    rec.delta = delta;
    try {
      BalanceSolution sol =
          solve_group(features, sample, group, metric, delta, options, target);
      rec.status = sol.solver_status;
      rec.at_origin = sol.at_origin;
      rec.usable = solve_usable(sol);
      if (rec.usable) {
        rec.gmim = gmim(features, sample, group, sol.full_weights(sample.n()),
                        metric, target);
        // Strict improvement keeps the largest delta on ties (the grid is
        // descending).
        if (!have_best || rec.gmim < best_gmim) {
          have_best = true;
          best_gmim = rec.gmim;
          trace.chosen_delta = delta;
          trace.chosen = std::move(sol);
        }
      }
    } catch (const NumericalError&) {
      rec.status = SolveStatus::LineSearchFailed;
      rec.usable = false;
    }
    trace.records.push_back(rec);
  }

  if (!have_best)
    throw AllSolvesFailed("no grid delta produced a usable solution");
  return trace;
}

std::optional<Index> detect_kink(const std::vector<double>& adjusted,
                                 const KinkRule& rule) {
  for (size_t j = 1; j < adjusted.size(); ++j) {
    if (adjusted[j] <= rule.floor) continue;
    if (adjusted[j] > rule.kappa * adjusted[j - 1])
      return static_cast<Index>(j + 1);  // 1-based step index
  }
  return std::nullopt;
}

namespace {

Sample subset_covariates(const Sample& sample, const std::vector<Index>& cols) {
  Matrix X(sample.n(), static_cast<Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) X.col(j) = sample.covariates.col(cols[j]);
  return Sample::make(std::move(X), sample.treatment, sample.outcome,
                      sample.ids);
}

}  // namespace

HdmbTrace hdmb(const Sample& sample, MetricKind metric_kind,
               const DeltaGrid& grid, const KinkRule& rule,
               const SolverOptions& options) {
  const Index p = sample.p();
  FeatureMatrix identity = evaluate(FeatureSpec::identity(), sample);
  Vector scores = asmd(identity, sample);

  HdmbTrace trace;
  trace.ranking.resize(p);
  std::iota(trace.ranking.begin(), trace.ranking.end(), Index{0});
  std::stable_sort(trace.ranking.begin(), trace.ranking.end(),
                   [&](Index a, Index b) { return scores[a] > scores[b]; });

  std::vector<double> adjusted;
  std::vector<Index> cols;
  trace.k0 = p;
  for (Index j = 1; j <= p; ++j) {
    cols.push_back(trace.ranking[static_cast<size_t>(j - 1)]);
    Sample sub = subset_covariates(sample, cols);
    FeatureMatrix feats = evaluate(FeatureSpec::identity(), sub);
    MetricFactor metric = build_metric(metric_kind, feats, sub);
    TuningTrace tuned = select_delta(feats, sub, 1, metric, grid, options);
    Vector w = tuned.chosen.full_weights(sub.n());
    HdmbStep step;
    step.j = j;
    step.gmim1 = gmim(feats, sub, 1, w, metric);
    step.adjusted = step.gmim1 / static_cast<double>(j);
    step.delta = tuned.chosen_delta;
    trace.steps.push_back(step);
    adjusted.push_back(step.adjusted);

    if (auto kink = detect_kink(adjusted, rule)) {
      trace.kink_found = true;
      trace.k0 = *kink - 1;
      break;
    }
  }

  std::vector<Index> selected(trace.ranking.begin(),
                              trace.ranking.begin() + trace.k0);
  Sample sub = subset_covariates(sample, selected);
  trace.selected_features = evaluate(FeatureSpec::identity(), sub);
  MetricFactor metric = build_metric(metric_kind, trace.selected_features, sub);
  trace.treated =
      select_delta(trace.selected_features, sub, 1, metric, grid, options);
  trace.control =
      select_delta(trace.selected_features, sub, 0, metric, grid, options);
  return trace;
}

}  // namespace mbal
