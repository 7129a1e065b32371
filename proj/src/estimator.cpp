#include "mbal/estimator.hpp"

#include <cmath>

#include "mbal/errors.hpp"
#include "mbal/parallel.hpp"
#include "mbal/rng.hpp"

namespace mbal {

std::string to_string(Estimand estimand) {
  return estimand == Estimand::ate ? "ate" : "atc";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::unadjusted: return "unadjusted";
    case Method::mb: return "mb";
    case Method::hdmb: return "hdmb";
  }
  return "unknown";
}

double ate(const Sample& sample, const BalanceSolution& treated,
           const BalanceSolution& control) {
  if (!sample.outcome) throw MissingOutcome("sample has no outcome column");
  const Vector& y = *sample.outcome;
  double sum1 = 0.0, sum0 = 0.0;
  for (size_t i = 0; i < treated.members.size(); ++i)
    sum1 += treated.weights[static_cast<Index>(i)] * y[treated.members[i]];
  for (size_t i = 0; i < control.members.size(); ++i)
    sum0 += control.weights[static_cast<Index>(i)] * y[control.members[i]];
  return sum1 - sum0;
}

Vector atc_target_mean(const FeatureMatrix& features, const Sample& sample) {
  GroupView g = group_view(sample, 0);
  Vector mean = Vector::Zero(features.K());
  for (Index i : g.indices) mean += features.values.row(i).transpose();
  return mean / static_cast<double>(g.size());
}

namespace {

BalanceSolution uniform_group_solution(const Sample& sample, int group,
                                       Index dim) {
  GroupView g = group_view(sample, group);
  BalanceSolution sol;
  sol.theta = Vector::Zero(dim);
  sol.weights =
      Vector::Constant(g.size(), 1.0 / static_cast<double>(g.size()));
  sol.weights_unnormalized = sol.weights;
  sol.group = group;
  sol.at_origin = true;
  sol.members = g.indices;
  return sol;
}

}  // namespace

PipelineResult run_pipeline(
    const Sample& sample, const PipelineConfig& config, bool keep_hdmb_trace,
    const std::optional<std::pair<double, double>>& frozen_deltas) {
  PipelineResult result;

  if (config.method == Method::hdmb) {
    DeltaGrid grid = config.delta.grid ? DeltaGrid::standard()
                                       : DeltaGrid::single(config.delta.fixed);
    HdmbTrace trace =
        hdmb(sample, config.metric, grid, config.kink, config.solver);
    result.treated = trace.treated.chosen;
    result.control = trace.control.chosen;
    result.delta_treated = trace.treated.chosen_delta;
    result.delta_control = trace.control.chosen_delta;
    result.hdmb_k0 = trace.k0;
    if (keep_hdmb_trace) result.hdmb_trace = trace;
  } else {
    FeatureMatrix features = evaluate(config.features, sample);
    std::optional<Vector> target;
    if (config.estimand == Estimand::atc)
      target = atc_target_mean(features, sample);

    if (config.method == Method::unadjusted) {
      result.treated = uniform_group_solution(sample, 1, features.K());
      result.control = uniform_group_solution(sample, 0, features.K());
    } else {
      MetricFactor metric = build_metric(config.metric, features, sample);
      if (frozen_deltas) {
        result.treated =
            solve_group(features, sample, 1, metric, frozen_deltas->first,
                        config.solver, target);
        result.control =
            solve_group(features, sample, 0, metric, frozen_deltas->second,
                        config.solver, target);
      } else if (config.delta.grid) {
        result.treated = select_delta(features, sample, 1, metric,
                                      DeltaGrid::standard(), config.solver,
                                      target)
                             .chosen;
        result.control = select_delta(features, sample, 0, metric,
                                      DeltaGrid::standard(), config.solver,
                                      target)
                             .chosen;
      } else {
        result.treated = solve_group(features, sample, 1, metric,
                                     config.delta.fixed, config.solver, target);
        result.control = solve_group(features, sample, 0, metric,
                                     config.delta.fixed, config.solver, target);
      }
      result.delta_treated = result.treated.delta;
      result.delta_control = result.control.delta;
    }
  }

  if (sample.outcome)
    result.estimate = ate(sample, result.treated, result.control);

  // Reports use W1 on the reporting features: for hdmb the full identity set
  // (the balancing basis was a subset), otherwise the balancing features.
  FeatureSpec report_spec = config.method == Method::hdmb
                                ? FeatureSpec::identity()
                                : config.features;
  FeatureMatrix report_features = evaluate(report_spec, sample);
  std::optional<Vector> report_target;
  if (config.estimand == Estimand::atc)
    report_target = atc_target_mean(report_features, sample);
  MetricFactor report_metric =
      build_metric(MetricKind::W1_diagonal, report_features, sample);
  Vector w = combine_weights(sample, result.treated, result.control);
  result.diagnostics = diagnostics_report(report_features, sample, w,
                                          report_metric, report_target);
  return result;
}

BootstrapResult bootstrap_se(const Sample& sample, const PipelineConfig& config,
                             int B, std::uint64_t seed, int threads) {
  if (B < 2) throw ValidationError("bootstrap needs B >= 2");
  if (!sample.outcome) throw MissingOutcome("bootstrap needs an outcome");

  PipelineResult base = run_pipeline(sample, config);

  std::optional<std::pair<double, double>> frozen;
  if (config.freeze_delta && config.method != Method::unadjusted &&
      config.method != Method::hdmb)
    frozen = std::make_pair(base.delta_treated, base.delta_control);

  const Index n = sample.n();
  constexpr int kMaxAttempts = 64;
  std::vector<double> estimates(B);
  std::vector<int> attempts_used(B, 0);

  parallel_for(B, threads, [&](Index b) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Rng rng(seed, /*stream=*/2,
              static_cast<std::uint64_t>(b) * kMaxAttempts +
                  static_cast<std::uint64_t>(attempt));
      Matrix X(n, sample.p());
      IntVector T(n);
      Vector Y(n);
      std::vector<std::string> ids;
      for (Index i = 0; i < n; ++i) {
        Index r = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
        X.row(i) = sample.covariates.row(r);
        T[i] = sample.treatment[r];
        Y[i] = (*sample.outcome)[r];
      }
      try {
        Sample repl = Sample::make(std::move(X), std::move(T), std::move(Y));
        PipelineResult pr = run_pipeline(repl, config, false, frozen);
        estimates[b] = *pr.estimate;
        attempts_used[b] = attempt + 1;
        return;
      } catch (const Error&) {
        continue;  // redraw
      }
    }
    attempts_used[b] = kMaxAttempts + 1;  // marker: exhausted
  });

  long extra = 0;
  for (int b = 0; b < B; ++b) {
    if (attempts_used[b] == 0 || attempts_used[b] > kMaxAttempts)
      throw TooManyFailedReplicates("bootstrap replicate " + std::to_string(b) +
                                    " failed repeatedly");
    extra += attempts_used[b] - 1;
  }
  if (extra > static_cast<long>(0.2 * B))
    throw TooManyFailedReplicates("bootstrap redraw budget exhausted");

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= B;
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);

  BootstrapResult out;
  out.point = *base.estimate;
  out.se = std::sqrt(ss / (B - 1));
  out.reps = B;
  return out;
}

}  // namespace mbal
