#ifndef GRCERT_REGRESSION_HPP
#define GRCERT_REGRESSION_HPP

#include <vector>

namespace grcert {

// Ordinary least squares line with the sufficient statistics needed for
// prediction intervals.
struct RegressionModel {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double r_squared = 0.0;
  double residual_std = 0.0;  // s, with n-2 degrees of freedom
  double x_mean = 0.0;
  double s_xx = 0.0;
  int n_points = 0;
};

// Fits y = beta0 + beta1 * x. Throws CalibrationError on fewer than three
// points or zero x-variance.
RegressionModel fit_log_regression(const std::vector<double>& x, const std::vector<double>& y);

double predict_mean(const RegressionModel& reg, double x);

// Standard deviation of a single new observation's prediction at x:
// s * sqrt(1 + 1/n + (x - x_mean)^2 / S_xx).
double prediction_interval_sd(const RegressionModel& reg, double x);

}  // namespace grcert

#endif
