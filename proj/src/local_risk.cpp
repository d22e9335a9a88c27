#include "grcert/local_risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grcert/errors.hpp"
#include "grcert/stats.hpp"

namespace grcert {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
// A new level must clear the previous one by this much or the run is flagged Stuck.
constexpr double kLevelProgressEps = 1e-12;
}  // namespace

MarginStats margin_stats(const MarginFn& margin_fn, const PerturbationBall& ball, int count,
                         RngStream& rng, bool keep_raw) {
  ball.validate();
  if (count < 2) throw ConfigError("margin statistics need at least two perturbations");
  MarginStats stats;
  stats.count = count;
  std::vector<double> margins(count);
  for (int i = 0; i < count; ++i) margins[i] = margin_fn(sample_ball_point(ball, rng));
  stats.mean = sample_mean(margins);
  stats.stddev = sample_stddev(margins);
  if (keep_raw) stats.raw = std::move(margins);
  return stats;
}

LocalRiskEstimate naive_mc_local_risk(const MarginFn& margin_fn, const PerturbationBall& ball,
                                      int count, RngStream& rng) {
  ball.validate();
  if (count < 1) throw ConfigError("naive MC needs at least one perturbation");
  int hits = 0;
  for (int i = 0; i < count; ++i) {
    if (margin_fn(sample_ball_point(ball, rng)) >= 0.0) ++hits;
  }
  LocalRiskEstimate est;
  est.method = EstimateMethod::NaiveMC;
  est.value = static_cast<double>(hits) / count;
  est.log_value = hits == 0 ? -kInf : std::log(est.value);
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / count);
  return est;
}

LocalRiskEstimate param_est_local_risk(const MarginStats& stats) {
  LocalRiskEstimate est;
  est.method = EstimateMethod::ParamEst;
  est.std_error = kNan;
  if (stats.stddev < 0.0) throw ConfigError("margin stddev must be nonnegative");
  if (stats.stddev == 0.0) {
    // point mass: every perturbation has the same margin
    est.value = stats.mean >= 0.0 ? 1.0 : 0.0;
    est.log_value = stats.mean >= 0.0 ? 0.0 : -kInf;
    return est;
  }
  est.log_value = log_normal_upper_tail(-stats.mean / stats.stddev);
  est.value = std::exp(est.log_value);
  return est;
}

void AMLSConfig::validate() const {
  if (!(quantile > 0.0 && quantile < 1.0)) throw ConfigError("AMLS quantile must be in (0,1)");
  if (particles < 10) throw ConfigError("AMLS needs at least 10 particles");
  if (max_levels < 1) throw ConfigError("AMLS max_levels must be >= 1");
  if (mh_updates_per_level < 1) throw ConfigError("AMLS mh_updates_per_level must be >= 1");
  if (!(proposal.initial_width_fraction > 0.0))
    throw ConfigError("AMLS proposal width fraction must be positive");
  if (!(proposal.target_acceptance > 0.0 && proposal.target_acceptance < 1.0))
    throw ConfigError("AMLS target acceptance must be in (0,1)");
}

std::string to_string(AmlsTermination t) {
  switch (t) {
    case AmlsTermination::ReachedZero: return "reached_zero";
    case AmlsTermination::MaxLevels: return "max_levels";
    case AmlsTermination::Stuck: return "stuck";
  }
  return "stuck";
}

double AMLSResult::estimate() const { return std::exp(log_risk); }

AMLSResult local_amls(const MarginFn& margin_fn, const PerturbationBall& ball,
                      const AMLSConfig& cfg, RngStream& rng) {
  ball.validate();
  cfg.validate();

  AMLSResult result;
  const int m = cfg.particles;
  std::vector<Vector> particles;
  particles.reserve(m);
  std::vector<double> margins(m);
  for (int i = 0; i < m; ++i) {
    particles.push_back(sample_ball_point(ball, rng));
    margins[i] = margin_fn(particles.back());
  }
  result.margin_evals += m;

  // survivors per level: the top floor(quantile * m) particles, at least one
  const int keep = std::max(1, static_cast<int>(cfg.quantile * m));
  double width = cfg.proposal.initial_width_fraction * ball.radius;
  double log_risk = 0.0;

  auto record_counterexamples = [&] {
    for (int i = 0; i < m; ++i) {
      if (margins[i] >= 0.0) result.counterexamples.push_back({particles[i], margins[i]});
    }
  };

  for (int level_index = 0; level_index < cfg.max_levels; ++level_index) {
    std::vector<double> sorted = margins;
    std::nth_element(sorted.begin(), sorted.end() - keep - 1, sorted.end());
    const double candidate = sorted[m - keep - 1];

    if (candidate >= 0.0) {
      // final level: count the closed violation set {margin >= 0}
      int hits = 0;
      for (double z : margins)
        if (z >= 0.0) ++hits;
      const double fraction = static_cast<double>(hits) / m;
      result.levels.push_back(0.0);
      result.survival_fractions.push_back(fraction);
      result.log_risk = log_risk + std::log(fraction);
      result.terminated = AmlsTermination::ReachedZero;
      record_counterexamples();
      return result;
    }

    if (!result.levels.empty() && candidate <= result.levels.back() + kLevelProgressEps) {
      result.log_risk = log_risk;
      result.terminated = AmlsTermination::Stuck;
      record_counterexamples();
      return result;
    }

    std::vector<int> survivors;
    survivors.reserve(keep);
    for (int i = 0; i < m; ++i)
      if (margins[i] > candidate) survivors.push_back(i);
    if (survivors.empty()) {
      // degenerate margins (e.g. all identical): no particle clears the level
      result.log_risk = log_risk;
      result.terminated = AmlsTermination::Stuck;
      record_counterexamples();
      return result;
    }

    const double fraction = static_cast<double>(survivors.size()) / m;
    result.levels.push_back(candidate);
    result.survival_fractions.push_back(fraction);
    log_risk += std::log(fraction);

    // resample survivors with replacement back to the full population
    std::vector<Vector> next_particles(m);
    std::vector<double> next_margins(m);
    for (int i = 0; i < m; ++i) {
      const int pick = survivors[rng.uniform_int(static_cast<int>(survivors.size()))];
      next_particles[i] = particles[pick];
      next_margins[i] = margins[pick];
    }
    particles.swap(next_particles);
    margins.swap(next_margins);

    // Metropolis-Hastings mutations: symmetric per-coordinate uniform moves,
    // accepted iff the proposal stays in the ball and above the level
    for (int sweep = 0; sweep < cfg.mh_updates_per_level; ++sweep) {
      int accepted = 0;
      for (int i = 0; i < m; ++i) {
        Vector proposal = particles[i];
        for (Eigen::Index k = 0; k < proposal.size(); ++k)
          proposal[k] += rng.uniform(-width, width);
        if (!ball.contains(proposal)) continue;
        const double z = margin_fn(proposal);
        ++result.margin_evals;
        if (z > candidate) {
          particles[i] = std::move(proposal);
          margins[i] = z;
          ++accepted;
        }
      }
      const double rate = static_cast<double>(accepted) / m;
      result.acceptance_rates.push_back(rate);
      // multiplicative adaptation toward the target acceptance rate
      width *= std::exp(rate - cfg.proposal.target_acceptance);
      width = std::min(std::max(width, 1e-8 * ball.radius), 2.0 * ball.radius);
      result.proposal_widths.push_back(width);
    }
  }

  result.log_risk = log_risk;
  result.terminated = AmlsTermination::MaxLevels;
  record_counterexamples();
  return result;
}

double replicate_sd(const std::vector<double>& log_risks) {
  if (log_risks.size() < 2) throw ConfigError("replicate_sd needs at least two replicates");
  return sample_stddev(log_risks);
}

}  // namespace grcert
