#include "mbal/simlab.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "mbal/errors.hpp"
#include "mbal/parallel.hpp"
#include "mbal/rng.hpp"

namespace mbal {

// Committed oracle values, see src/simlab_oracle.gen.cpp.
namespace oracle {
extern const double kTrueAteB;
extern const double kTrueAteM1;
extern const double kTrueAteM2;
}  // namespace oracle

Scenario scenario_from_string(const std::string& name) {
  if (name == "A" || name == "a") return Scenario::A;
  if (name == "B" || name == "b") return Scenario::B;
  if (name == "C" || name == "c") return Scenario::C;
  if (name == "D" || name == "d") return Scenario::D;
  if (name == "E" || name == "e") return Scenario::E;
  if (name == "F" || name == "f") return Scenario::F;
  if (name == "M1" || name == "m1") return Scenario::M1;
  if (name == "M2" || name == "m2") return Scenario::M2;
  throw UnknownScenario("unknown scenario: " + name);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
    case Scenario::D: return "D";
    case Scenario::E: return "E";
    case Scenario::F: return "F";
    case Scenario::M1: return "M1";
    case Scenario::M2: return "M2";
  }
  return "?";
}

ScenarioSpec ScenarioSpec::standard(Scenario id) {
  ScenarioSpec spec;
  spec.id = id;
  switch (id) {
    case Scenario::A:
    case Scenario::B:
    case Scenario::C:
      spec.n = 200;
      spec.p = 10;
      break;
    case Scenario::D:
      spec.n = 1000;
      spec.p = 10;
      break;
    case Scenario::E:
    case Scenario::F:
    case Scenario::M1:
    case Scenario::M2:
      spec.n = 200;
      spec.p = 100;
      break;
  }
  return spec;
}

ScenarioSpec ScenarioSpec::with_overrides(Scenario id, Index n_override,
                                          Index p_override) {
  ScenarioSpec spec = standard(id);
  if (n_override > 0) spec.n = n_override;
  if (p_override > 0) spec.p = p_override;
  return spec;
}

FeatureSpec ScenarioSpec::default_features() const {
  return id == Scenario::B ? FeatureSpec::interactions()
                           : FeatureSpec::identity();
}

namespace {

// Lower Cholesky of the equicorrelated matrix (1 on the diagonal, rho off).
Matrix chol_equicorrelated(Index p, double rho) {
  Matrix sigma = Matrix::Constant(p, p, rho);
  sigma.diagonal().setOnes();
  return Eigen::LLT<Matrix>(sigma).matrixL();
}

// Lower Cholesky of the banded matrix with entries 2^{-|j-k|}.
Matrix chol_banded_half(Index p) {
  Matrix sigma(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      sigma(i, j) = std::pow(2.0, -static_cast<double>(std::abs(i - j)));
  return Eigen::LLT<Matrix>(sigma).matrixL();
}

Matrix draw_rows(Rng& rng, Index n, Index p) {
  Matrix g(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) g(i, j) = rng.next_normal();
  return g;
}

IntVector draw_treatment(Rng& rng, const Vector& propensity) {
  IntVector t(propensity.size());
  for (Index i = 0; i < propensity.size(); ++i)
    t[i] = rng.next_bernoulli(propensity[i]) ? 1 : 0;
  return t;
}

double logistic(double eta) { return 1.0 / (1.0 + std::exp(eta)); }

}  // namespace

Sample generate(const ScenarioSpec& spec, std::uint64_t seed,
                std::uint64_t rep) {
  Rng rng(seed, /*stream=*/1, rep);
  const Index n = spec.n;
  const Index p = spec.p;

  switch (spec.id) {
    case Scenario::A: {
      Matrix Z = draw_rows(rng, n, p);
      Matrix X(n, p);
      for (Index i = 0; i < n; ++i) {
        X(i, 0) = std::exp(Z(i, 0) / 2.0);
        X(i, 1) = Z(i, 1) / (1.0 + std::exp(Z(i, 0)));
        X(i, 2) = std::pow(Z(i, 0) * Z(i, 2) + 0.6, 3);
        X(i, 3) = std::pow(Z(i, 1) + Z(i, 3) + 20.0, 2);
        for (Index j = 4; j < p; ++j) X(i, j) = Z(i, j);
      }
      Vector pi(n);
      for (Index i = 0; i < n; ++i)
        pi[i] = logistic(0.5 * Z(i, 0) + 0.1 * Z(i, 3));
      IntVector T = draw_treatment(rng, pi);
      Vector Y(n);
      for (Index i = 0; i < n; ++i) {
        double s = Z(i, 0) + Z(i, 1) + Z(i, 2) + Z(i, 3);
        Y[i] = 210.0 + (1.5 * T[i] - 0.5) * 13.7 * s + rng.next_normal();
      }
      return Sample::make(std::move(X), std::move(T), std::move(Y));
    }

    case Scenario::B:
    case Scenario::C: {
      IntVector T(n);
      for (Index i = 0; i < n; ++i) T[i] = rng.next_bernoulli(0.5) ? 1 : 0;
      Matrix L1 = chol_equicorrelated(p, 0.5);
      Matrix X(n, p);
      for (Index i = 0; i < n; ++i) {
        Vector g = rng.normal_vector(p);
        if (T[i] == 1)
          X.row(i) = (Vector::Ones(p) + L1 * g).transpose();
        else if (spec.id == Scenario::B)
          X.row(i) = (Vector::Ones(p) + g).transpose();
        else
          X.row(i) = g.transpose();
      }
      Vector Y(n);
      for (Index i = 0; i < n; ++i) {
        double sum = X.row(i).sum();
        double y = (1.0 + T[i]) * sum;
        if (spec.id == Scenario::B) {
          double cyc = 0.0;
          for (Index j = 0; j < p; ++j) cyc += X(i, j) * X(i, (j + 1) % p);
          y += (1.0 + T[i]) * cyc;
        }
        Y[i] = y + rng.next_normal();
      }
      return Sample::make(std::move(X), std::move(T), std::move(Y));
    }

    case Scenario::D: {
      Matrix X = draw_rows(rng, n, p).array() + 1.0;
      Vector pi(n);
      for (Index i = 0; i < n; ++i)
        pi[i] = 1.0 / (1.0 + 19.0 * std::exp(X.row(i).sum() - 10.0));
      IntVector T = draw_treatment(rng, pi);
      Vector Y(n);
      for (Index i = 0; i < n; ++i)
        Y[i] = (1.0 + T[i]) * X.row(i).sum() + rng.next_normal();
      return Sample::make(std::move(X), std::move(T), std::move(Y));
    }

    case Scenario::E:
    case Scenario::F:
    case Scenario::M1:
    case Scenario::M2: {
      Matrix L = chol_banded_half(p);
      Matrix X = draw_rows(rng, n, p) * L.transpose();

      Vector pi(n);
      for (Index i = 0; i < n; ++i) {
        double eta;
        if (spec.id == Scenario::E) {
          eta = X(i, 0);
          for (Index j = 1; j < 6; ++j) eta += X(i, j);
        } else if (spec.id == Scenario::M1) {
          eta = X(i, 0);
          for (Index j = 1; j < 6; ++j) eta += X(i, j) / 2.0;
        } else {  // F, M2
          eta = X(i, 0);
          for (Index j = 1; j < 5; ++j) eta += X(i, j) / 2.0;
          double tail = 0.0;
          for (Index j = 5; j < p; ++j) tail += X(i, j);
          eta += 10.0 * tail / static_cast<double>(p);
        }
        pi[i] = logistic(eta);
      }
      IntVector T = draw_treatment(rng, pi);

      Vector Y(n);
      for (Index i = 0; i < n; ++i) {
        double y;
        if (spec.id == Scenario::E) {
          double s5 = X.row(i).head(5).sum();
          y = T[i] == 1 ? s5 : s5 / 2.0;
        } else if (spec.id == Scenario::F) {
          double sa = X.row(i).sum() / static_cast<double>(p);
          y = T[i] == 1 ? 10.0 * sa : 5.0 * sa;
        } else if (spec.id == Scenario::M1) {
          double s = X.row(i).head(6).sum() +
                     X.row(i).head(6).array().square().sum();
          y = T[i] == 1 ? s : s / 2.0;
        } else {  // M2
          double s = X.row(i).sum() +
                     X.row(i).head(50).array().square().sum();
          y = T[i] == 1 ? s / 10.0 : s / 20.0;
        }
        Y[i] = y + rng.next_normal();
      }
      return Sample::make(std::move(X), std::move(T), std::move(Y));
    }
  }
  throw UnknownScenario("unhandled scenario");
}

double true_ate(const ScenarioSpec& spec) {
  switch (spec.id) {
    case Scenario::A: return 0.0;   // effect is 1.5*13.7*sum(Z1..Z4), mean 0
    case Scenario::B: return oracle::kTrueAteB;
    case Scenario::C: return 5.0;   // mixture mean of sum(X): (10 + 0) / 2
    case Scenario::D: return 10.0;  // E[sum X] with X ~ N(1, I)
    case Scenario::E: return 0.0;
    case Scenario::F: return 0.0;
    case Scenario::M1: return oracle::kTrueAteM1;
    case Scenario::M2: return oracle::kTrueAteM2;
  }
  throw UnknownScenario("unhandled scenario");
}

MethodConfig make_method_config(const ScenarioSpec& spec,
                                const std::string& label) {
  MethodConfig mc;
  mc.label = label;
  PipelineConfig& cfg = mc.pipeline;
  cfg.features = spec.default_features();
  if (label == "unad" || label == "unadjusted") {
    cfg.method = Method::unadjusted;
  } else if (label == "mb") {
    cfg.method = Method::mb;
    cfg.metric = MetricKind::W1_diagonal;
  } else if (label == "mb2") {
    cfg.method = Method::mb;
    cfg.metric = MetricKind::W2_full;
  } else if (label == "kernelmb") {
    cfg.method = Method::mb;
    cfg.metric = MetricKind::W1_diagonal;
    cfg.features = FeatureSpec::kernel_gaussian();
  } else if (label == "hdmb") {
    cfg.method = Method::hdmb;
    cfg.metric = MetricKind::W1_diagonal;
  } else {
    throw ValidationError("unknown method label: " + label);
  }
  return mc;
}

ReplicateRecord run_replicate(const ScenarioSpec& spec,
                              const MethodConfig& method, std::uint64_t seed,
                              Index rep) {
  ReplicateRecord rec;
  rec.rep = static_cast<int>(rep);
  try {
    Sample sample = generate(spec, seed, static_cast<std::uint64_t>(rep));
    PipelineResult pr = run_pipeline(sample, method.pipeline);
    rec.estimate = *pr.estimate;
    rec.mean_weighted_asmd = pr.diagnostics.asmd_mean;
    rec.gmim_total = pr.diagnostics.gmim_total();
    rec.ok = true;
  } catch (const Error&) {
    rec.ok = false;
  }
  return rec;
}

namespace {

// Compensated (Kahan) accumulation so the aggregation is reproducible and
// accurate when summed in replicate order.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

}  // namespace

McSummary run_monte_carlo(const ScenarioSpec& spec, const MethodConfig& method,
                          int reps, std::uint64_t seed, int threads,
                          std::vector<ReplicateRecord>* records) {
  if (reps < 2) throw ValidationError("need at least 2 replicates");

  std::vector<ReplicateRecord> recs(reps);
  parallel_for(reps, threads, [&](Index r) {
    recs[r] = run_replicate(spec, method, seed, r);
  });

  const double target = true_ate(spec);
  KahanSum est_sum, asmd_sum, gmim_sum, sq_err_sum;
  int ok_count = 0;
  for (const auto& rec : recs) {
    if (!rec.ok) continue;
    ++ok_count;
    est_sum.add(rec.estimate);
    asmd_sum.add(rec.mean_weighted_asmd);
    gmim_sum.add(rec.gmim_total);
    sq_err_sum.add((rec.estimate - target) * (rec.estimate - target));
  }
  if (ok_count < 2) throw AllSolvesFailed("fewer than 2 replicates succeeded");

  const double mean_est = est_sum.value() / ok_count;
  KahanSum var_sum;
  for (const auto& rec : recs) {
    if (!rec.ok) continue;
    var_sum.add((rec.estimate - mean_est) * (rec.estimate - mean_est));
  }

  McSummary s;
  s.method = method.label;
  s.bias = mean_est - target;
  s.sd = std::sqrt(var_sum.value() / (ok_count - 1));
  s.rmse = std::sqrt(sq_err_sum.value() / ok_count);
  s.mean_weighted_asmd = asmd_sum.value() / ok_count;
  s.gmim_total = gmim_sum.value() / ok_count;
  s.reps = ok_count;
  s.seed = seed;
  s.failed = reps - ok_count;
  s.partial = s.failed > 0.01 * reps;
  s.true_ate = target;

  if (records) *records = std::move(recs);
  return s;
}

}  // namespace mbal
