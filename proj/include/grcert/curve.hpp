#ifndef GRCERT_CURVE_HPP
#define GRCERT_CURVE_HPP

#include <string>
#include <vector>

#include "grcert/local_risk.hpp"
#include "grcert/model.hpp"

namespace grcert {

// One per-sample lognormal summary of local robustness risk: the log-risk
// location mu_hat and its spread sigma_hat. sigma_hat == 0 entries are point
// estimates (mu_hat may be -inf for an observed-zero naive MC estimate).
struct CurveEntry {
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
  EstimateMethod method = EstimateMethod::AMLS;
};

struct CumulativeRobustnessCurve {
  std::vector<CurveEntry> entries;
  Metric metric = Metric::M2;
  double radius = 0.0;
  std::string config_fingerprint;
};

// R(t): probability that a random nominal sample is robust at local threshold
// t, i.e. the average of P(N(mu_hat_i, sigma_hat_i^2) <= log t). Monotone
// non-decreasing in t with values in [0, 1]. Throws ConfigError outside (0, 1].
double evaluate_curve(const CumulativeRobustnessCurve& curve, double t);

// Log-spaced t grid on [t_min, t_max] for plotting.
std::vector<double> log_spaced_grid(double t_min, double t_max, int points);

}  // namespace grcert

#endif
