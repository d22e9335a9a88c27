#ifndef GRCERT_BALL_HPP
#define GRCERT_BALL_HPP

#include <string>
#include <vector>

#include "grcert/errors.hpp"
#include "grcert/rng.hpp"
#include "grcert/types.hpp"

namespace grcert {

enum class BallNorm { Linf };  // other norms reserved

// l_inf neighbourhood of a nominal input.
struct PerturbationBall {
  Vector center;
  double radius = 0.0;
  BallNorm norm = BallNorm::Linf;

  void validate() const {
    if (!(radius > 0.0)) throw ConfigError("perturbation radius must be positive");
    if (center.size() == 0) throw ConfigError("perturbation ball has an empty center");
  }

  bool contains(const VectorRef& x) const {
    if (x.size() != center.size()) return false;
    return ((x - center).cwiseAbs().array() <= radius).all();
  }
};

// One uniform draw; each coordinate independent on [c_k - r, c_k + r].
inline Vector sample_ball_point(const PerturbationBall& ball, RngStream& rng) {
  Vector x(ball.center.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double lo = ball.center[k] - ball.radius;
    const double hi = ball.center[k] + ball.radius;
    // clamp to guard against the rare rounding excursion past the bound
    x[k] = std::min(std::max(rng.uniform(lo, hi), lo), hi);
  }
  return x;
}

inline std::vector<Vector> sample_ball(const PerturbationBall& ball, int count, RngStream& rng) {
  if (count < 1) throw ConfigError("ball sample count must be >= 1");
  std::vector<Vector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(sample_ball_point(ball, rng));
  return out;
}

}  // namespace grcert

#endif
