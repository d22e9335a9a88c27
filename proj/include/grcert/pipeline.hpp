#ifndef GRCERT_PIPELINE_HPP
#define GRCERT_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grcert/curve.hpp"
#include "grcert/generator.hpp"
#include "grcert/local_risk.hpp"
#include "grcert/model.hpp"
#include "grcert/regression.hpp"

namespace grcert {

struct CertificationConfig {
  int n_samples = 100;               // N: nominal samples from the generator
  int perturbations_per_sample = 200;  // M: ball draws for margin statistics
  int calibration_subset = 20;       // N0: samples evaluated by splitting
  double radius = 0.1;
  Metric metric = Metric::M2;
  AMLSConfig amls;
  std::uint64_t seed = 0;
  double acceptable_error = 0.0;  // rho
  double pac_epsilon = 0.05;
  double pac_delta = 0.05;
  std::vector<double> thresholds = {1e-5, 1e-10, 1e-15};
  bool include_censored_in_regression = false;
  int workers = 0;  // 0 = available parallelism

  void validate() const;
};

// Hoeffding sample size: smallest N with two-sided deviation above epsilon
// having probability at most delta for a [0,1]-bounded mean.
int pac_sample_size(double epsilon, double delta);

struct CriterionResult {
  double t = 0.0;
  double rho = 0.0;
  double curve_value = 0.0;       // R(t)
  double thresholded_risk = 0.0;  // 1 - R(t)
  bool satisfied = false;
};

struct BudgetAccounting {
  std::int64_t stats_margin_evals = 0;   // N * M
  std::int64_t amls_margin_evals = 0;    // summed over calibration samples
  std::int64_t report_forward_evals = 0; // nominal predictions, counterexample labeling
  std::int64_t oracle_evals = 0;

  std::int64_t total_forward_passes() const {
    return stats_margin_evals + amls_margin_evals + report_forward_evals;
  }
};

struct SampleDiagnostics {
  int index = 0;
  Label label = 0;
  double margin_mean = 0.0;
  double margin_stddev = 0.0;
  double x_log_param = 0.0;  // log parametric tail of the margin statistics
  bool amls_run = false;
  bool in_regression = false;
  double amls_log_risk = 0.0;
  AmlsTermination amls_termination = AmlsTermination::ReachedZero;
  std::int64_t amls_margin_evals = 0;
  int amls_levels = 0;
};

struct CounterexampleRecord {
  int nominal_index = 0;
  Vector nominal;
  Vector perturbed;
  Label nominal_prediction = 0;
  Label perturbed_prediction = 0;
  std::optional<Label> ground_truth;
  double margin = 0.0;
  double log_risk = 0.0;  // estimated log local risk of the nominal
  Metric metric = Metric::M2;
  double radius = 0.0;
};

struct CertificationReport {
  CumulativeRobustnessCurve curve;
  std::vector<CriterionResult> criteria;
  double r_star = 0.0;            // optimal reachable risk for the metric
  double r_star_std_error = 0.0;
  RegressionModel regression;
  BudgetAccounting budget;
  double runtime_seconds = 0.0;   // reported via the manifest, not report JSON
  std::vector<SampleDiagnostics> diagnostics;
  std::vector<Vector> nominals;
  std::vector<Label> nominal_labels;
  std::vector<CounterexampleRecord> counterexamples;
};

// End-to-end certification: global sampling, margin statistics, splitting on
// the calibration subset, log-log regression, per-sample risk prediction, and
// the cumulative robustness curve with the relaxed criterion evaluated at the
// configured thresholds.
CertificationReport run_certification(const MlpModel& model, const GeneratorSpec& generator,
                                      const CertificationConfig& cfg);

}  // namespace grcert

#endif
