#ifndef GRCERT_LOCAL_RISK_HPP
#define GRCERT_LOCAL_RISK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "grcert/ball.hpp"
#include "grcert/model.hpp"
#include "grcert/rng.hpp"
#include "grcert/types.hpp"

namespace grcert {

// Mean and spread of margins observed over ball perturbations.
struct MarginStats {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
  std::vector<double> raw;  // retained only on request
};

MarginStats margin_stats(const MarginFn& margin_fn, const PerturbationBall& ball, int count,
                         RngStream& rng, bool keep_raw = false);

enum class EstimateMethod { NaiveMC, ParamEst, AMLS };

struct LocalRiskEstimate {
  double value = 0.0;      // in [0, 1]; may underflow to 0 in deep tails
  double log_value = 0.0;  // authoritative in deep tails
  EstimateMethod method = EstimateMethod::NaiveMC;
  double std_error = 0.0;  // NaN when unknown
};

// Fraction of uniform ball draws with margin >= 0, with binomial standard error.
LocalRiskEstimate naive_mc_local_risk(const MarginFn& margin_fn, const PerturbationBall& ball,
                                      int count, RngStream& rng);

// Normal-tail estimate P(N(mu, sigma^2) >= 0) evaluated in log space.
// sigma == 0 degenerates to a point mass at mu.
LocalRiskEstimate param_est_local_risk(const MarginStats& stats);

struct AmlsProposal {
  double initial_width_fraction = 0.5;  // of the ball radius
  double target_acceptance = 0.3;
};

struct AMLSConfig {
  double quantile = 0.1;
  int particles = 200;
  int max_levels = 20;
  int mh_updates_per_level = 10;
  AmlsProposal proposal;

  void validate() const;
};

enum class AmlsTermination { ReachedZero, MaxLevels, Stuck };

std::string to_string(AmlsTermination t);

struct AmlsCounterexample {
  Vector point;
  double margin = 0.0;
};

struct AMLSResult {
  double log_risk = 0.0;  // <= 0
  std::vector<double> levels;
  std::vector<double> survival_fractions;  // one per level, last one at level 0
  std::vector<double> acceptance_rates;    // per completed mutation phase
  std::vector<double> proposal_widths;     // width at the end of each mutation phase
  AmlsTermination terminated = AmlsTermination::ReachedZero;
  std::vector<AmlsCounterexample> counterexamples;  // margin >= 0 particles at termination
  std::int64_t margin_evals = 0;

  double estimate() const;
};

// Adaptive multi-level splitting over the ball: raises margin levels by the
// configured quantile, resamples survivors, and mutates them with a
// Metropolis-Hastings kernel targeting the uniform distribution restricted to
// the current level set. The risk estimate is the product of realized
// per-level survival fractions.
AMLSResult local_amls(const MarginFn& margin_fn, const PerturbationBall& ball,
                      const AMLSConfig& cfg, RngStream& rng);

// Seed-bootstrap spread of replicated AMLS log-risk estimates.
double replicate_sd(const std::vector<double>& log_risks);

}  // namespace grcert

#endif
