#ifndef GRCERT_RISK_DECOMPOSITION_HPP
#define GRCERT_RISK_DECOMPOSITION_HPP

#include <cstdint>
#include <string>

#include "grcert/generator.hpp"
#include "grcert/local_risk.hpp"
#include "grcert/model.hpp"

namespace grcert {

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int count = 0;
};

// Monte Carlo error rate of the classifier over the generator distribution.
RiskEstimate classification_risk(const MlpModel& model, const GeneratorSpec& generator, int n,
                                 std::uint64_t seed, int workers = 0);

// Detector deciding whether some perturbation in B(x, r) flips the prediction.
struct FlipDetector {
  enum class Kind { NaiveMC, Amls } kind = Kind::NaiveMC;
  int probes = 200;   // naive MC probes per sample
  AMLSConfig amls;    // used by the Amls detector; fires on an observed flip
};

std::string to_string(FlipDetector::Kind kind);

// Fraction of correctly-classified nominals whose ball contains a prediction
// flip, per the detector.
RiskEstimate boundary_risk(const MlpModel& model, const GeneratorSpec& generator, int n, double r,
                           const FlipDetector& detector, std::uint64_t seed, int workers = 0);

// Fraction of correct nominals within r of a ground-truth boundary but not of
// the model boundary; both membership tests share one probe set per sample.
RiskEstimate ground_truth_boundary_risk(const MlpModel& model, const GeneratorSpec& generator,
                                        int n, double r, int probes, std::uint64_t seed,
                                        int workers = 0);

// Empirical check of the risk decomposition relations: the m1 equality, the m2
// inequality, and the m0 approximation. All per-sample indicators share one
// probe set so the comparisons are consistent.
struct DecompositionReport {
  RiskEstimate r_c, r_b, r_gb;
  RiskEstimate r_rob_m0, r_rob_m1, r_rob_m2;
  double residual_m0 = 0.0;  // R_rob(m0) - (R_c + R_b + R_gb), no pass/fail bound
  double residual_m1 = 0.0;  // R_rob(m1) - (R_c + R_b), zero in expectation
  double residual_m2 = 0.0;  // R_rob(m2) - (R_c + R_b), nonpositive by construction
  double combined_se_m1 = 0.0;
  double combined_se_m2 = 0.0;
  std::string detector;
  std::int64_t forward_passes = 0;
  int samples = 0;
  int probes_per_sample = 0;
};

DecompositionReport decomposition_check(const MlpModel& model, const GeneratorSpec& generator,
                                        int n, int m, double r, std::uint64_t seed,
                                        int workers = 0);

}  // namespace grcert

#endif
