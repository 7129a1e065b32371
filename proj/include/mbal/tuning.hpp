#pragma once

#include <optional>
#include <vector>

#include "mbal/balancer.hpp"
#include "mbal/dataset.hpp"
#include "mbal/diagnostics.hpp"
#include "mbal/features.hpp"
#include "mbal/metric.hpp"
#include "mbal/types.hpp"

namespace mbal {

struct DeltaGrid {
  // Strictly decreasing positive values; default 10^0 .. 10^-6.
  std::vector<double> values;

  static DeltaGrid standard();
  static DeltaGrid single(double delta) { return DeltaGrid{{delta}}; }
};

// 10^-4, the documented fast path when grid search is off.
double fixed_delta_policy();

struct DeltaRecord {
  double delta = 0.0;
  double gmim = 0.0;
  SolveStatus status = SolveStatus::Converged;
  bool at_origin = false;
  bool usable = false;
};

struct TuningTrace {
  std::vector<DeltaRecord> records;
  double chosen_delta = 0.0;
  BalanceSolution chosen;
};

// Algorithm: solve at every grid delta, score by GMIM of the normalized
// weights, return the argmin record; ties break toward the largest delta.
// Failed solves stay in the trace but are excluded from the argmin.
TuningTrace select_delta(const FeatureMatrix& features, const Sample& sample,
                         int group, const MetricFactor& metric,
                         const DeltaGrid& grid,
                         const SolverOptions& options = {},
                         const std::optional<Vector>& target = std::nullopt);

struct KinkRule {
  double kappa = 2.0;   // ratio threshold between consecutive adjusted values
  double floor = 1e-8;  // activity floor; ratios among near-zeros are ignored
};

// First step j (1-based, j >= 2) where adjusted[j-1] > kappa*adjusted[j-2]
// and adjusted[j-1] > floor; nullopt if the curve stays flat.
std::optional<Index> detect_kink(const std::vector<double>& adjusted,
                                 const KinkRule& rule);

struct HdmbStep {
  Index j = 0;          // number of covariates in this step
  double gmim1 = 0.0;   // treated-group GMIM at the tuned delta
  double adjusted = 0.0;  // gmim1 / j
  double delta = 0.0;   // tuned delta at this step
};

struct HdmbTrace {
  std::vector<Index> ranking;  // covariate indices by descending ASMD
  std::vector<HdmbStep> steps;
  Index k0 = 0;
  bool kink_found = false;
  TuningTrace treated;
  TuningTrace control;
  FeatureMatrix selected_features;  // the K0 ranked covariate columns
};

// High-dimensional balancing: rank covariates by unweighted ASMD, grow the
// identity basis one covariate at a time, watch GMIM_1/j for a kink, then
// tune both groups on the first K0 covariates.
HdmbTrace hdmb(const Sample& sample, MetricKind metric_kind,
               const DeltaGrid& grid, const KinkRule& rule = {},
               const SolverOptions& options = {});

}  // namespace mbal
