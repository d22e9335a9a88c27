#ifndef GRCERT_STATS_HPP
#define GRCERT_STATS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace grcert {

inline constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// erfc stays well clear of the double underflow threshold up to this point;
// beyond it the tail is evaluated with the divergent asymptotic series, whose
// truncation error at k = 8 is below 1e-6 relative.
inline constexpr double kTailAsymptoticSwitch = 8.0;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// log P(N(0,1) > k), finite for any finite k.
inline double log_normal_upper_tail(double k) {
  if (k < kTailAsymptoticSwitch) {
    return std::log(0.5 * std::erfc(k * kInvSqrt2));
  }
  const double k2 = k * k;
  double term = 1.0;
  double series = 1.0;
  for (int i = 1; i <= 5; ++i) {
    term *= -(2.0 * i - 1.0) / k2;
    series += term;
  }
  return -0.5 * k2 - std::log(k) - kLogSqrt2Pi + std::log(series);
}

// P(N(0,1) > k). Underflows to 0 around k = 38.5; use the log form in deep tails.
inline double normal_upper_tail(double k) {
  if (k < kTailAsymptoticSwitch) return 0.5 * std::erfc(k * kInvSqrt2);
  return std::exp(log_normal_upper_tail(k));
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Unbiased sample standard deviation; requires at least two values.
inline double sample_stddev(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace grcert

#endif
