#include "grcert/regression.hpp"

#include <cmath>

#include "grcert/errors.hpp"

namespace grcert {

RegressionModel fit_log_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw CalibrationError("regression inputs have different lengths");
  const int n = static_cast<int>(x.size());
  if (n < 3) throw CalibrationError("regression needs at least 3 calibration points, got " +
                                    std::to_string(n));
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw CalibrationError("regression inputs must be finite");
  }

  double x_mean = 0.0, y_mean = 0.0;
  for (int i = 0; i < n; ++i) {
    x_mean += x[i];
    y_mean += y[i];
  }
  x_mean /= n;
  y_mean /= n;

  double s_xx = 0.0, s_xy = 0.0, s_yy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[i] - x_mean;
    const double dy = y[i] - y_mean;
    s_xx += dx * dx;
    s_xy += dx * dy;
    s_yy += dy * dy;
  }
  if (s_xx <= 0.0)
    throw CalibrationError("calibration subset is uninformative: parametric estimates have no variance");

  RegressionModel reg;
  reg.n_points = n;
  reg.x_mean = x_mean;
  reg.s_xx = s_xx;
  reg.beta1 = s_xy / s_xx;
  reg.beta0 = y_mean - reg.beta1 * x_mean;

  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double resid = y[i] - (reg.beta0 + reg.beta1 * x[i]);
    sse += resid * resid;
  }
  reg.residual_std = std::sqrt(std::max(0.0, sse) / (n - 2));
  if (s_yy > 0.0) {
    reg.r_squared = std::min(1.0, std::max(0.0, 1.0 - sse / s_yy));
  } else {
    reg.r_squared = sse == 0.0 ? 1.0 : 0.0;
  }
  return reg;
}

double predict_mean(const RegressionModel& reg, double x) { return reg.beta0 + reg.beta1 * x; }

double prediction_interval_sd(const RegressionModel& reg, double x) {
  if (reg.n_points < 3) throw CalibrationError("prediction interval requires a fitted regression");
  const double dx = x - reg.x_mean;
  return reg.residual_std * std::sqrt(1.0 + 1.0 / reg.n_points + dx * dx / reg.s_xx);
}

}  // namespace grcert
