#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbal/dataset.hpp"
#include "mbal/estimator.hpp"
#include "mbal/types.hpp"

namespace mbal {

enum class Scenario { A, B, C, D, E, F, M1, M2 };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario scenario);

struct ScenarioSpec {
  Scenario id = Scenario::A;
  Index n = 0;
  Index p = 0;

  // Paper defaults: A/B/C (200, 10), D (1000, 10), E/F (200, 100 or 500),
  // M1/M2 (200, 100).
  static ScenarioSpec standard(Scenario id);
  static ScenarioSpec with_overrides(Scenario id, Index n_override,
                                     Index p_override);

  // Basis the balancing methods use by default: interactions for B
  // (the confounders are products), identity otherwise.
  FeatureSpec default_features() const;
};

// Draws one sample.  Same (spec, seed, rep) gives a bit-identical sample;
// replicate r of a Monte Carlo run uses rep = r.  Draw order per scenario:
// covariate block, then treatment block, then noise block (B and C draw the
// treatment block first because the covariate law depends on it).
Sample generate(const ScenarioSpec& spec, std::uint64_t seed,
                std::uint64_t rep = 0);

// E[Y(1) - Y(0)] under the scenario's data law.  Analytic where the mean is
// zero or a mixture mean; B/M1/M2 come from a committed Monte Carlo oracle
// (tools/gen-true-ate regenerates the constants).
double true_ate(const ScenarioSpec& spec);

struct MethodConfig {
  std::string label;
  PipelineConfig pipeline;
};

// Builds the pipeline for one of the paper's method labels:
// unad | mb | mb2 | kernelmb | hdmb.
MethodConfig make_method_config(const ScenarioSpec& spec,
                                const std::string& label);

struct ReplicateRecord {
  int rep = 0;
  double estimate = 0.0;
  double mean_weighted_asmd = 0.0;
  double gmim_total = 0.0;
  bool ok = false;
};

struct McSummary {
  std::string method;
  double bias = 0.0;
  double sd = 0.0;
  double rmse = 0.0;
  double mean_weighted_asmd = 0.0;
  double gmim_total = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  int failed = 0;
  bool partial = false;  // more than 1% of replicates failed
  double true_ate = 0.0;
};

ReplicateRecord run_replicate(const ScenarioSpec& spec,
                              const MethodConfig& method, std::uint64_t seed,
                              Index rep);

// reps replicates on independent streams; aggregation happens in replicate
// order after all workers finish, so results do not depend on the thread
// count.
McSummary run_monte_carlo(const ScenarioSpec& spec, const MethodConfig& method,
                          int reps, std::uint64_t seed, int threads = 0,
                          std::vector<ReplicateRecord>* records = nullptr);

}  // namespace mbal
