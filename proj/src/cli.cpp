#include "mbal/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mbal/dataset.hpp"
#include "mbal/errors.hpp"
#include "mbal/estimator.hpp"
#include "mbal/jsonio.hpp"
#include "mbal/simlab.hpp"
#include "mbal/tuning.hpp"

namespace mbal {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

FeatureSpec parse_features(const RunConfig& cfg) {
  if (cfg.features == "identity") return FeatureSpec::identity();
  if (cfg.features == "interactions") return FeatureSpec::interactions();
  if (cfg.features == "moments2") return FeatureSpec::moments2();
  if (cfg.features == "kernel" || cfg.features == "kernel_gaussian")
    return FeatureSpec::kernel_gaussian(cfg.bandwidth);
  throw ValidationError("unknown feature spec: " + cfg.features);
}

MetricKind parse_metric(const std::string& s) {
  if (s == "w1") return MetricKind::W1_diagonal;
  if (s == "w2") return MetricKind::W2_full;
  throw ValidationError("unknown metric: " + s);
}

DeltaPolicy parse_delta(const std::string& s) {
  if (s == "grid") return DeltaPolicy::grid_search();
  std::string value = s;
  if (s.rfind("fixed:", 0) == 0) value = s.substr(6);
  try {
    size_t pos = 0;
    double d = std::stod(value, &pos);
    if (pos != value.size() || !(d > 0.0))
      throw ValidationError("fixed delta must be positive: " + s);
    return DeltaPolicy::fixed_value(d);
  } catch (const std::invalid_argument&) {
    throw ValidationError("cannot parse delta policy: " + s);
  }
}

Estimand parse_estimand(const std::string& s) {
  if (s == "ate") return Estimand::ate;
  if (s == "atc") return Estimand::atc;
  throw ValidationError("unknown estimand: " + s);
}

PipelineConfig pipeline_from(const RunConfig& cfg) {
  PipelineConfig pc;
  pc.method = cfg.uniform ? Method::unadjusted
                          : (cfg.hdmb ? Method::hdmb : Method::mb);
  pc.features = parse_features(cfg);
  pc.metric = parse_metric(cfg.metric);
  pc.delta = parse_delta(cfg.delta);
  pc.estimand = parse_estimand(cfg.estimand);
  pc.kink.kappa = cfg.kappa;
  pc.freeze_delta = cfg.freeze_delta;
  return pc;
}

Sample resolve_sample(const RunConfig& cfg, bool need_outcome) {
  if (cfg.input_path.has_value() == cfg.scenario.has_value())
    throw ValidationError("exactly one of --input / --scenario is required");
  if (cfg.input_path) {
    if (need_outcome && !cfg.outcome_col)
      throw MissingOutcome("an --outcome column is required");
    return load_csv(*cfg.input_path, cfg.treatment_col, cfg.outcome_col,
                    cfg.covariate_cols);
  }
  ScenarioSpec spec = ScenarioSpec::with_overrides(
      scenario_from_string(*cfg.scenario), cfg.n_override, cfg.p_override);
  return generate(spec, cfg.seed);
}

std::string input_label(const RunConfig& cfg) {
  return cfg.input_path ? *cfg.input_path : ("scenario:" + *cfg.scenario);
}

Json diagnostics_json(const DiagnosticsReport& d) {
  Json j = Json::object();
  j.set("weights_used", d.weights_used);
  j.set("asmd_max", d.asmd_max);
  j.set("asmd_mean", d.asmd_mean);
  j.set("asmd_median", d.asmd_median);
  j.set("md", d.md);
  j.set("mim", d.mim);
  j.set("gmim_treated", d.gmim_treated);
  j.set("gmim_control", d.gmim_control);
  j.set("gmim_total", d.gmim_total());
  j.set("asmd", Json::array_of(d.asmd));
  return j;
}

Json group_json(const BalanceSolution& sol) {
  Json j = Json::object();
  j.set("delta", sol.delta);
  j.set("at_origin", sol.at_origin);
  j.set("solver_status", to_string(sol.solver_status));
  j.set("iterations", sol.iterations);
  j.set("grad_norm", sol.grad_norm);
  j.set("theta", Json::array_of(sol.theta));
  return j;
}

Json run_header(const RunConfig& cfg, const std::string& command) {
  Json j = Json::object();
  j.set("schema_version", 1);
  j.set("command", command);
  j.set("input", input_label(cfg));
  j.set("seed", static_cast<long long>(cfg.seed));
  return j;
}

void write_weights_csv(const std::string& path, const Sample& sample,
                       VectorRef weights) {
  std::string out = "id,treatment,weight\n";
  for (Index i = 0; i < sample.n(); ++i) {
    out += sample.ids.empty() ? std::to_string(i) : sample.ids[i];
    out += ',';
    out += std::to_string(sample.treatment[i]);
    out += ',';
    out += fmt17(weights[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace

int cmd_weights(const RunConfig& cfg) {
  Sample sample = resolve_sample(cfg, /*need_outcome=*/false);
  if (cfg.export_sample) write_csv(sample, *cfg.export_sample);

  PipelineConfig pc = pipeline_from(cfg);
  PipelineResult pr = run_pipeline(sample, pc);

  Json report = run_header(cfg, "weights");
  report.set("estimand", cfg.estimand);
  report.set("features", cfg.features);
  report.set("metric", cfg.metric);
  report.set("delta_policy", cfg.delta);
  report.set("delta_treated", pr.delta_treated);
  report.set("delta_control", pr.delta_control);
  report.set("treated", group_json(pr.treated));
  report.set("control", group_json(pr.control));
  if (pc.method == Method::hdmb)
    report.set("hdmb_k0", static_cast<long long>(pr.hdmb_k0));
  report.set("diagnostics", diagnostics_json(pr.diagnostics));

  if (cfg.weights_out)
    write_weights_csv(*cfg.weights_out, sample,
                      combine_weights(sample, pr.treated, pr.control));
  if (cfg.report_out) write_text_file(*cfg.report_out, report.dump());
  if (!cfg.report_out && !cfg.weights_out) std::cout << report.dump();
  return 0;
}

int cmd_ate(const RunConfig& cfg) {
  Sample sample = resolve_sample(cfg, /*need_outcome=*/true);
  if (!sample.outcome) throw MissingOutcome("ate needs an outcome column");

  PipelineConfig pc = pipeline_from(cfg);
  PipelineResult pr = run_pipeline(sample, pc);

  Json report = run_header(cfg, "ate");
  report.set("estimand", cfg.estimand);
  report.set("point", *pr.estimate);
  if (cfg.bootstrap > 0) {
    BootstrapResult boot =
        bootstrap_se(sample, pc, cfg.bootstrap, cfg.seed, cfg.threads);
    report.set("se", boot.se);
    report.set("bootstrap_reps", boot.reps);
  } else {
    report.set("bootstrap_reps", 0);
  }
  report.set("delta_treated", pr.delta_treated);
  report.set("delta_control", pr.delta_control);
  report.set("diagnostics", diagnostics_json(pr.diagnostics));

  if (cfg.report_out)
    write_text_file(*cfg.report_out, report.dump());
  else
    std::cout << report.dump();
  return 0;
}

int cmd_tune(const RunConfig& cfg) {
  Sample sample = resolve_sample(cfg, /*need_outcome=*/false);
  PipelineConfig pc = pipeline_from(cfg);

  Json report = run_header(cfg, "tune");
  std::string curve;

  if (cfg.hdmb) {
    DeltaGrid grid = pc.delta.grid ? DeltaGrid::standard()
                                   : DeltaGrid::single(pc.delta.fixed);
    HdmbTrace trace = hdmb(sample, pc.metric, grid, pc.kink);
    Json h = Json::object();
    h.set("k0", static_cast<long long>(trace.k0));
    h.set("kink_found", trace.kink_found);
    Json ranking = Json::array();
    for (Index c : trace.ranking) ranking.push_back(static_cast<long long>(c));
    h.set("ranking", std::move(ranking));
    Json steps = Json::array();
    curve = "j,gmim1,adjusted,delta\n";
    for (const auto& s : trace.steps) {
      Json row = Json::object();
      row.set("j", static_cast<long long>(s.j));
      row.set("gmim1", s.gmim1);
      row.set("adjusted", s.adjusted);
      row.set("delta", s.delta);
      steps.push_back(std::move(row));
      curve += std::to_string(s.j) + ',' + fmt17(s.gmim1) + ',' +
               fmt17(s.adjusted) + ',' + fmt17(s.delta) + '\n';
    }
    h.set("steps", std::move(steps));
    h.set("delta_treated", trace.treated.chosen_delta);
    h.set("delta_control", trace.control.chosen_delta);
    report.set("hdmb", std::move(h));
  } else {
    FeatureMatrix features = evaluate(pc.features, sample);
    MetricFactor metric = build_metric(pc.metric, features, sample);
    std::optional<Vector> target;
    if (pc.estimand == Estimand::atc)
      target = atc_target_mean(features, sample);
    curve = "group,delta,gmim\n";
    for (int group : {1, 0}) {
      TuningTrace trace = select_delta(features, sample, group, metric,
                                       DeltaGrid::standard(), pc.solver,
                                       target);
      Json g = Json::object();
      g.set("chosen_delta", trace.chosen_delta);
      Json records = Json::array();
      for (const auto& r : trace.records) {
        Json row = Json::object();
        row.set("delta", r.delta);
        row.set("gmim", r.usable ? Json(r.gmim) : Json());
        row.set("status", to_string(r.status));
        row.set("at_origin", r.at_origin);
        row.set("usable", r.usable);
        records.push_back(std::move(row));
        curve += std::to_string(group) + ',' + fmt17(r.delta) + ',' +
                 (r.usable ? fmt17(r.gmim) : std::string("")) + '\n';
      }
      g.set("records", std::move(records));
      report.set(group == 1 ? "treated" : "control", std::move(g));
    }
  }

  if (cfg.curve_out) write_text_file(*cfg.curve_out, curve);
  if (cfg.trace_out)
    write_text_file(*cfg.trace_out, report.dump());
  else
    std::cout << report.dump();
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  if (!cfg.scenario) throw ValidationError("simulate requires --scenario");
  if (cfg.reps < 2) throw ValidationError("simulate needs --reps >= 2");
  ScenarioSpec spec = ScenarioSpec::with_overrides(
      scenario_from_string(*cfg.scenario), cfg.n_override, cfg.p_override);

  std::string label = cfg.method;
  if (cfg.hdmb) label = "hdmb";
  MethodConfig method = make_method_config(spec, label);
  if (!parse_delta(cfg.delta).grid)
    method.pipeline.delta = parse_delta(cfg.delta);
  method.pipeline.kink.kappa = cfg.kappa;

  std::vector<ReplicateRecord> records;
  McSummary summary = run_monte_carlo(spec, method, cfg.reps, cfg.seed,
                                      cfg.threads, &records);

  std::printf(
      "%-3s %-9s Bias %7.2f  SD %6.2f  RMSE %6.2f  meanASMD %5.2f  GMIM %5.2f\n",
      to_string(spec.id).c_str(), summary.method.c_str(), summary.bias,
      summary.sd, summary.rmse, summary.mean_weighted_asmd,
      summary.gmim_total);

  Json j = run_header(cfg, "simulate");
  j.set("scenario", to_string(spec.id));
  j.set("method", summary.method);
  j.set("n", static_cast<long long>(spec.n));
  j.set("p", static_cast<long long>(spec.p));
  j.set("reps", summary.reps);
  j.set("true_ate", summary.true_ate);
  j.set("bias", summary.bias);
  j.set("sd", summary.sd);
  j.set("rmse", summary.rmse);
  j.set("mean_weighted_asmd", summary.mean_weighted_asmd);
  j.set("gmim_total", summary.gmim_total);
  j.set("failed", summary.failed);
  j.set("partial", summary.partial);

  if (cfg.summary_out) write_text_file(*cfg.summary_out, j.dump());
  if (cfg.reps_out) {
    std::string csv = "rep,estimate,mean_weighted_asmd,gmim_total,ok\n";
    for (const auto& r : records) {
      csv += std::to_string(r.rep) + ',';
      if (r.ok)
        csv += fmt17(r.estimate) + ',' + fmt17(r.mean_weighted_asmd) + ',' +
               fmt17(r.gmim_total) + ",1\n";
      else
        csv += ",,,0\n";
    }
    write_text_file(*cfg.reps_out, csv);
  }
  return 0;
}

namespace {

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input_path, "input CSV path");
  sub->add_option("--scenario", cfg.scenario,
                  "built-in scenario (A|B|C|D|E|F|M1|M2)");
  sub->add_option("--n", cfg.n_override, "override scenario sample size");
  sub->add_option("--p", cfg.p_override, "override scenario dimension");
  sub->add_option("--treatment", cfg.treatment_col, "treatment column name");
  sub->add_option("--outcome", cfg.outcome_col, "outcome column name");
  sub->add_option("--covariates", cfg.covariate_cols,
                  "covariate column names")
      ->delimiter(',');
  sub->add_option("--features", cfg.features,
                  "identity|interactions|moments2|kernel");
  sub->add_option("--bandwidth", cfg.bandwidth,
                  "Gaussian kernel bandwidth (default: median heuristic)");
  sub->add_option("--metric", cfg.metric, "w1|w2");
  sub->add_option("--delta", cfg.delta, "grid or fixed:<value>");
  sub->add_option("--estimand", cfg.estimand, "ate|atc");
  sub->add_flag("--uniform-weights", cfg.uniform,
                "skip balancing, use uniform weights");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--threads", cfg.threads, "worker cap (0 = all cores)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Mahalanobis balancing weights, diagnostics and simulations"};
  app.require_subcommand(1);
  app.set_config("--config");

  auto* weights = app.add_subcommand("weights", "estimate balancing weights");
  add_common_options(weights, cfg);
  weights->add_flag("--hdmb", cfg.hdmb, "high-dimensional covariate selection");
  weights->add_option("--kappa", cfg.kappa, "kink ratio threshold");
  weights->add_option("--weights-out", cfg.weights_out, "per-subject weight CSV");
  weights->add_option("--report-out", cfg.report_out, "JSON report path");
  weights->add_option("--export-sample", cfg.export_sample,
                      "write the resolved sample as CSV");

  auto* ate_cmd = app.add_subcommand("ate", "estimate the treatment effect");
  add_common_options(ate_cmd, cfg);
  ate_cmd->add_flag("--hdmb", cfg.hdmb, "high-dimensional covariate selection");
  ate_cmd->add_option("--kappa", cfg.kappa, "kink ratio threshold");
  std::vector<std::string> boot_vals;
  auto* boot = ate_cmd->add_option("--bootstrap", boot_vals,
                                   "bootstrap SE, optional rep count "
                                   "(default 500)");
  boot->expected(0, 1);
  ate_cmd->add_flag("--freeze-delta", cfg.freeze_delta,
                    "reuse the original-sample deltas in bootstrap replicates");
  ate_cmd->add_option("--report-out", cfg.report_out, "JSON report path");

  auto* tune = app.add_subcommand("tune", "delta grid and hdmb traces");
  add_common_options(tune, cfg);
  tune->add_flag("--hdmb", cfg.hdmb, "emit the covariate-selection trace");
  tune->add_option("--kappa", cfg.kappa, "kink ratio threshold");
  tune->add_option("--trace-out", cfg.trace_out, "JSON trace path");
  tune->add_option("--curve-out", cfg.curve_out, "plot-ready CSV path");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study");
  add_common_options(sim, cfg);
  sim->add_option("--method", cfg.method, "unad|mb|mb2|kernelmb|hdmb");
  sim->add_flag("--hdmb", cfg.hdmb, "shorthand for --method hdmb");
  sim->add_option("--kappa", cfg.kappa, "kink ratio threshold");
  sim->add_option("--reps", cfg.reps, "Monte Carlo replicates");
  sim->add_option("--summary-out", cfg.summary_out, "summary JSON path");
  sim->add_option("--reps-out", cfg.reps_out, "per-replicate CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (boot->count() > 0)
      cfg.bootstrap = boot_vals.empty() ? 500 : std::stoi(boot_vals[0]);
    if (weights->parsed()) return cmd_weights(cfg);
    if (ate_cmd->parsed()) return cmd_ate(cfg);
    if (tune->parsed()) return cmd_tune(cfg);
    if (sim->parsed()) return cmd_simulate(cfg);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace mbal
