#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mbal/balancer.hpp"
#include "mbal/dataset.hpp"
#include "mbal/diagnostics.hpp"
#include "mbal/tuning.hpp"
#include "mbal/types.hpp"

namespace mbal {

// Weighted outcome difference: sum_t w_i Y_i - sum_c w_i Y_i with the
// per-group normalized weights.
double ate(const Sample& sample, const BalanceSolution& treated,
           const BalanceSolution& control);

// Control-group mean of the features; replaces the pooled mean as the
// balancing target for ATC workflows.
Vector atc_target_mean(const FeatureMatrix& features, const Sample& sample);

enum class Estimand { ate, atc };
enum class Method { unadjusted, mb, hdmb };

std::string to_string(Estimand estimand);
std::string to_string(Method method);

struct DeltaPolicy {
  bool grid = true;
  double fixed = 1e-4;  // used when grid is false

  static DeltaPolicy grid_search() { return {true, 0.0}; }
  static DeltaPolicy fixed_value(double delta) { return {false, delta}; }
};

// Everything needed to run the full weighting pipeline on a sample.
struct PipelineConfig {
  Method method = Method::mb;
  FeatureSpec features;
  MetricKind metric = MetricKind::W1_diagonal;
  DeltaPolicy delta;
  Estimand estimand = Estimand::ate;
  KinkRule kink;
  SolverOptions solver;
  // Bootstrap only: reuse the deltas tuned on the original sample instead of
  // re-selecting per replicate.
  bool freeze_delta = false;
};

struct PipelineResult {
  BalanceSolution treated;
  BalanceSolution control;
  double delta_treated = 0.0;
  double delta_control = 0.0;
  std::optional<double> estimate;  // present when the sample has outcomes
  DiagnosticsReport diagnostics;
  Index hdmb_k0 = 0;               // 0 unless method == hdmb
  std::optional<HdmbTrace> hdmb_trace;
};

// Features -> metric -> delta selection -> both group solves -> estimate and
// diagnostics.  Diagnostics use W1 on the reporting features (the full
// identity set for hdmb, the balancing features otherwise).
PipelineResult run_pipeline(const Sample& sample, const PipelineConfig& config,
                            bool keep_hdmb_trace = false,
                            const std::optional<std::pair<double, double>>&
                                frozen_deltas = std::nullopt);

struct BootstrapResult {
  double point = 0.0;
  double se = 0.0;
  int reps = 0;
};

// Pairs bootstrap: resample n rows with replacement and re-run the whole
// pipeline per replicate; replicates with an empty group or a failed solve
// are redrawn from fresh substreams (at most 20% of B extra draws).
BootstrapResult bootstrap_se(const Sample& sample, const PipelineConfig& config,
                             int B, std::uint64_t seed, int threads = 0);

}  // namespace mbal
