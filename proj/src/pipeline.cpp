#include "grcert/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "grcert/errors.hpp"
#include "grcert/hash.hpp"
#include "grcert/parallel.hpp"
#include "grcert/stats.hpp"

namespace grcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Disjoint stream blocks so per-sample substreams never collide.
enum StreamBlock : std::uint64_t {
  kNominalBlock = 1,
  kStatsBlock = 2,
  kAmlsBlock = 3,
};

std::uint64_t stream_id(StreamBlock block, std::int64_t index) {
  return (static_cast<std::uint64_t>(block) << 48) + static_cast<std::uint64_t>(index);
}

// log of the parametric normal-tail risk for fitted margin statistics;
// degenerate spreads collapse to a point mass.
double parametric_log_tail(const MarginStats& stats) {
  if (stats.stddev == 0.0) return stats.mean >= 0.0 ? 0.0 : -kInf;
  return log_normal_upper_tail(-stats.mean / stats.stddev);
}

std::string config_fingerprint(const CertificationConfig& cfg) {
  std::string s;
  s += std::to_string(cfg.n_samples) + "|" + std::to_string(cfg.perturbations_per_sample) + "|";
  s += std::to_string(cfg.calibration_subset) + "|" + std::to_string(cfg.radius) + "|";
  s += to_string(cfg.metric) + "|" + std::to_string(cfg.seed) + "|";
  s += std::to_string(cfg.amls.quantile) + "|" + std::to_string(cfg.amls.particles) + "|";
  s += std::to_string(cfg.amls.max_levels) + "|" + std::to_string(cfg.amls.mh_updates_per_level);
  return to_hex(fnv1a64(s));
}

}  // namespace

void CertificationConfig::validate() const {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (perturbations_per_sample < 2) throw ConfigError("perturbations_per_sample must be >= 2");
  if (calibration_subset < 1 || calibration_subset > n_samples)
    throw ConfigError("calibration_subset must satisfy 1 <= N0 <= N (got N0=" +
                      std::to_string(calibration_subset) + ", N=" + std::to_string(n_samples) + ")");
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(acceptable_error >= 0.0 && acceptable_error <= 1.0))
    throw ConfigError("acceptable error rho must be in [0,1]");
  if (!(pac_epsilon > 0.0 && pac_epsilon <= 1.0) || !(pac_delta > 0.0 && pac_delta <= 1.0))
    throw ConfigError("PAC parameters epsilon, delta must be in (0,1]");
  if (thresholds.empty()) throw ConfigError("at least one threshold t is required");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in (0,1]");
  }
  amls.validate();
}

int pac_sample_size(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in (0,1]");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must be in (0,1]");
  return static_cast<int>(std::ceil(std::log(2.0 / delta) / (2.0 * epsilon * epsilon)));
}

CertificationReport run_certification(const MlpModel& model, const GeneratorSpec& generator,
                                      const CertificationConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  if (cfg.calibration_subset < 3)
    throw CalibrationError("calibration subset must contain at least 3 samples");
  if (model.input_dim() != generator.output_dim())
    throw ConfigError("generator output dimension does not match model input dimension");
  const bool needs_oracle = cfg.metric != Metric::M2;
  if (needs_oracle && !generator.has_oracle())
    throw UnsupportedMetricError("metric " + to_string(cfg.metric) +
                                 " requires a generator with a ground-truth oracle");

  const int n = cfg.n_samples;
  const int n0 = cfg.calibration_subset;
  const GroundTruthFn oracle = generator.has_oracle() ? generator.ground_truth_fn() : GroundTruthFn();
  const GroundTruthFn* oracle_ptr = generator.has_oracle() ? &oracle : nullptr;

  CertificationReport report;
  report.nominals.resize(n);
  report.nominal_labels.resize(n);
  report.diagnostics.resize(n);
  std::vector<double> x_log(n);
  std::vector<AMLSResult> amls_results(n0);

  parallel_for(n, cfg.workers, [&](std::int64_t i) {
    RngStream nominal_rng(cfg.seed, stream_id(kNominalBlock, i));
    const Label psi = nominal_rng.uniform_int(generator.class_count());
    const Vector g = generator.sample_class(psi, nominal_rng);

    const MarginFn margin_fn = make_margin_fn(model, g, cfg.metric, oracle_ptr);
    const PerturbationBall ball{g, cfg.radius, BallNorm::Linf};

    RngStream stats_rng(cfg.seed, stream_id(kStatsBlock, i));
    const MarginStats stats =
        margin_stats(margin_fn, ball, cfg.perturbations_per_sample, stats_rng);

    SampleDiagnostics& diag = report.diagnostics[i];
    diag.index = static_cast<int>(i);
    diag.label = psi;
    diag.margin_mean = stats.mean;
    diag.margin_stddev = stats.stddev;
    diag.x_log_param = parametric_log_tail(stats);
    x_log[i] = diag.x_log_param;

    if (i < n0) {
      RngStream amls_rng(cfg.seed, stream_id(kAmlsBlock, i));
      AMLSResult res = local_amls(margin_fn, ball, cfg.amls, amls_rng);
      diag.amls_run = true;
      diag.amls_log_risk = res.log_risk;
      diag.amls_termination = res.terminated;
      diag.amls_margin_evals = res.margin_evals;
      diag.amls_levels = static_cast<int>(res.levels.size());
      amls_results[i] = std::move(res);
    }

    report.nominals[i] = g;
    report.nominal_labels[i] = psi;
  });

  report.budget.stats_margin_evals =
      static_cast<std::int64_t>(n) * cfg.perturbations_per_sample;
  for (const AMLSResult& res : amls_results)
    report.budget.amls_margin_evals += res.margin_evals;

  // calibration pairs: log parametric tail vs log splitting estimate
  std::vector<double> cal_x, cal_y;
  for (int i = 0; i < n0; ++i) {
    const AMLSResult& res = amls_results[i];
    const bool censored = res.terminated != AmlsTermination::ReachedZero;
    if (censored && !cfg.include_censored_in_regression) continue;
    if (!std::isfinite(x_log[i]) || !std::isfinite(res.log_risk)) continue;
    report.diagnostics[i].in_regression = true;
    cal_x.push_back(x_log[i]);
    cal_y.push_back(res.log_risk);
  }
  report.regression = fit_log_regression(cal_x, cal_y);

  // curve entries: splitting estimates where available, regression predictions
  // with prediction-interval spread elsewhere
  report.curve.metric = cfg.metric;
  report.curve.radius = cfg.radius;
  report.curve.config_fingerprint = config_fingerprint(cfg);
  report.curve.entries.resize(n);
  for (int i = 0; i < n; ++i) {
    CurveEntry& e = report.curve.entries[i];
    if (i < n0) {
      e.method = EstimateMethod::AMLS;
      e.mu_hat = amls_results[i].log_risk;
      e.sigma_hat = report.regression.residual_std;
    } else {
      e.method = EstimateMethod::ParamEst;
      if (std::isfinite(x_log[i])) {
        e.mu_hat = predict_mean(report.regression, x_log[i]);
        e.sigma_hat = prediction_interval_sd(report.regression, x_log[i]);
      } else {
        // degenerate margin spread: point-mass local risk of 0 or 1
        e.mu_hat = x_log[i] < 0.0 ? -kInf : 0.0;
        e.sigma_hat = 0.0;
      }
    }
  }

  // optimal reachable risk: measured classification risk for m0/m1, zero for m2
  if (cfg.metric == Metric::M2) {
    report.r_star = 0.0;
    report.r_star_std_error = 0.0;
  } else {
    int errors = 0;
    for (int i = 0; i < n; ++i) {
      if (model.predict(report.nominals[i]) != oracle(report.nominals[i])) ++errors;
    }
    report.budget.report_forward_evals += n;
    report.budget.oracle_evals += n;
    report.r_star = static_cast<double>(errors) / n;
    report.r_star_std_error = std::sqrt(report.r_star * (1.0 - report.r_star) / n);
  }

  report.criteria.reserve(cfg.thresholds.size());
  for (double t : cfg.thresholds) {
    CriterionResult c;
    c.t = t;
    c.rho = cfg.acceptable_error;
    c.curve_value = evaluate_curve(report.curve, t);
    c.thresholded_risk = 1.0 - c.curve_value;
    c.satisfied = c.thresholded_risk <= report.r_star + c.rho;
    report.criteria.push_back(c);
  }

  // counterexamples harvested from the splitting runs, margins re-verified
  for (int i = 0; i < n0; ++i) {
    const AMLSResult& res = amls_results[i];
    if (res.counterexamples.empty()) continue;
    const Label nominal_pred = model.predict(report.nominals[i]);
    ++report.budget.report_forward_evals;
    for (const AmlsCounterexample& cex : res.counterexamples) {
      CounterexampleRecord rec;
      rec.nominal_index = i;
      rec.nominal = report.nominals[i];
      rec.perturbed = cex.point;
      rec.nominal_prediction = nominal_pred;
      rec.perturbed_prediction = model.predict(cex.point);
      ++report.budget.report_forward_evals;
      if (generator.has_oracle()) rec.ground_truth = generator.ground_truth(cex.point);
      rec.margin = cex.margin;
      rec.log_risk = res.log_risk;
      rec.metric = cfg.metric;
      rec.radius = cfg.radius;
      report.counterexamples.push_back(std::move(rec));
    }
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace grcert
