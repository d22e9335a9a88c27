#include "grcert/curve.hpp"

#include <cmath>

#include "grcert/errors.hpp"
#include "grcert/stats.hpp"

namespace grcert {

double evaluate_curve(const CumulativeRobustnessCurve& curve, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ConfigError("threshold t must lie in (0, 1]");
  if (curve.entries.empty()) throw ConfigError("curve has no entries");
  const double log_t = std::log(t);
  double sum = 0.0;
  for (const CurveEntry& e : curve.entries) {
    if (e.sigma_hat > 0.0) {
      sum += normal_cdf((log_t - e.mu_hat) / e.sigma_hat);
    } else {
      sum += e.mu_hat <= log_t ? 1.0 : 0.0;
    }
  }
  return sum / static_cast<double>(curve.entries.size());
}

std::vector<double> log_spaced_grid(double t_min, double t_max, int points) {
  if (!(t_min > 0.0 && t_min < t_max && t_max <= 1.0))
    throw ConfigError("grid bounds must satisfy 0 < t_min < t_max <= 1");
  if (points < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> grid(points);
  const double lo = std::log(t_min);
  const double hi = std::log(t_max);
  for (int i = 0; i < points; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * i / (points - 1));
  }
  grid.back() = t_max;  // avoid rounding past the upper bound
  return grid;
}

}  // namespace grcert
