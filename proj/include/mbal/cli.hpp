#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbal/types.hpp"

namespace mbal {

// Parsed command-line configuration shared by the subcommands.
struct RunConfig {
  // Input: exactly one of input_path / scenario.
  std::optional<std::string> input_path;
  std::optional<std::string> scenario;
  Index n_override = 0;
  Index p_override = 0;
  std::string treatment_col = "treatment";
  std::optional<std::string> outcome_col;
  std::optional<std::vector<std::string>> covariate_cols;

  // Pipeline.
  std::string features = "identity";  // identity|interactions|moments2|kernel
  std::optional<double> bandwidth;
  std::string metric = "w1";  // w1|w2
  std::string delta = "grid";  // "grid" or "fixed:<value>"
  std::string estimand = "ate";  // ate|atc
  bool uniform = false;          // unadjusted (uniform weights)
  bool hdmb = false;
  double kappa = 2.0;
  bool freeze_delta = false;

  // ate subcommand.
  int bootstrap = 0;  // 0 = no bootstrap

  // simulate subcommand.
  std::string method = "mb";  // unad|mb|mb2|kernelmb|hdmb
  int reps = 1000;

  std::uint64_t seed = 1;
  int threads = 0;  // 0 = all cores

  // Outputs.
  std::optional<std::string> weights_out;
  std::optional<std::string> report_out;
  std::optional<std::string> trace_out;
  std::optional<std::string> curve_out;
  std::optional<std::string> summary_out;
  std::optional<std::string> reps_out;
  std::optional<std::string> export_sample;
};

// Exit statuses: 0 success, 2 input/validation, 3 numerical/solver, 4 I/O.
int cmd_weights(const RunConfig& config);
int cmd_ate(const RunConfig& config);
int cmd_tune(const RunConfig& config);
int cmd_simulate(const RunConfig& config);

int run_cli(int argc, const char* const* argv);

}  // namespace mbal
