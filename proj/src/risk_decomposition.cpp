#include "grcert/risk_decomposition.hpp"

#include <cmath>

#include "grcert/ball.hpp"
#include "grcert/errors.hpp"
#include "grcert/parallel.hpp"

namespace grcert {

namespace {

enum StreamBlock : std::uint64_t {
  kNominalBlock = 11,
  kProbeBlock = 12,
  kDetectorBlock = 13,
};

std::uint64_t stream_id(StreamBlock block, std::int64_t index) {
  return (static_cast<std::uint64_t>(block) << 48) + static_cast<std::uint64_t>(index);
}

RiskEstimate binomial_estimate(int hits, int n) {
  RiskEstimate est;
  est.count = n;
  est.value = static_cast<double>(hits) / n;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / n);
  return est;
}

}  // namespace

std::string to_string(FlipDetector::Kind kind) {
  return kind == FlipDetector::Kind::NaiveMC ? "naive_mc" : "amls";
}

RiskEstimate classification_risk(const MlpModel& model, const GeneratorSpec& generator, int n,
                                 std::uint64_t seed, int workers) {
  if (n < 1) throw ConfigError("classification risk needs n >= 1");
  if (!generator.has_oracle())
    throw UnsupportedMetricError("classification risk requires a ground-truth oracle");
  std::vector<char> wrong(n, 0);
  parallel_for(n, workers, [&](std::int64_t i) {
    RngStream rng(seed, stream_id(kNominalBlock, i));
    const Label psi = rng.uniform_int(generator.class_count());
    const Vector x = generator.sample_class(psi, rng);
    wrong[i] = model.predict(x) != generator.ground_truth(x) ? 1 : 0;
  });
  int hits = 0;
  for (char w : wrong) hits += w;
  return binomial_estimate(hits, n);
}

RiskEstimate boundary_risk(const MlpModel& model, const GeneratorSpec& generator, int n, double r,
                           const FlipDetector& detector, std::uint64_t seed, int workers) {
  if (n < 1) throw ConfigError("boundary risk needs n >= 1");
  if (!generator.has_oracle())
    throw UnsupportedMetricError("boundary risk requires a ground-truth oracle");
  if (!(r > 0.0)) throw ConfigError("boundary risk requires r > 0");
  std::vector<char> in_band(n, 0);
  parallel_for(n, workers, [&](std::int64_t i) {
    RngStream rng(seed, stream_id(kNominalBlock, i));
    const Label psi = rng.uniform_int(generator.class_count());
    const Vector x = generator.sample_class(psi, rng);
    const Label pred = model.predict(x);
    if (pred != generator.ground_truth(x)) return;  // only correct samples count
    const PerturbationBall ball{x, r, BallNorm::Linf};
    bool flipped = false;
    if (detector.kind == FlipDetector::Kind::NaiveMC) {
      RngStream probe_rng(seed, stream_id(kProbeBlock, i));
      for (int j = 0; j < detector.probes && !flipped; ++j) {
        flipped = model.predict(sample_ball_point(ball, probe_rng)) != pred;
      }
    } else {
      // splitting drives particles toward the flip region; fires on an observed flip
      const MarginFn margin_fn = make_margin_fn(model, x, Metric::M2, nullptr);
      RngStream amls_rng(seed, stream_id(kDetectorBlock, i));
      const AMLSResult res = local_amls(margin_fn, ball, detector.amls, amls_rng);
      flipped = !res.counterexamples.empty();
    }
    in_band[i] = flipped ? 1 : 0;
  });
  int hits = 0;
  for (char b : in_band) hits += b;
  return binomial_estimate(hits, n);
}

RiskEstimate ground_truth_boundary_risk(const MlpModel& model, const GeneratorSpec& generator,
                                        int n, double r, int probes, std::uint64_t seed,
                                        int workers) {
  if (n < 1 || probes < 1) throw ConfigError("ground-truth boundary risk needs n, probes >= 1");
  if (!generator.has_oracle())
    throw UnsupportedMetricError("ground-truth boundary risk requires an analytic oracle");
  if (!(r > 0.0)) throw ConfigError("ground-truth boundary risk requires r > 0");
  std::vector<char> in_band(n, 0);
  parallel_for(n, workers, [&](std::int64_t i) {
    RngStream rng(seed, stream_id(kNominalBlock, i));
    const Label psi = rng.uniform_int(generator.class_count());
    const Vector x = generator.sample_class(psi, rng);
    const Label pred = model.predict(x);
    const Label truth = generator.ground_truth(x);
    if (pred != truth) return;
    const PerturbationBall ball{x, r, BallNorm::Linf};
    RngStream probe_rng(seed, stream_id(kProbeBlock, i));
    bool oracle_flip = false;
    bool model_flip = false;
    // one probe set for both membership tests
    for (int j = 0; j < probes; ++j) {
      const Vector xp = sample_ball_point(ball, probe_rng);
      if (!oracle_flip && generator.ground_truth(xp) != truth) oracle_flip = true;
      if (!model_flip && model.predict(xp) != pred) model_flip = true;
      if (oracle_flip && model_flip) break;
    }
    in_band[i] = (oracle_flip && !model_flip) ? 1 : 0;
  });
  int hits = 0;
  for (char b : in_band) hits += b;
  return binomial_estimate(hits, n);
}

DecompositionReport decomposition_check(const MlpModel& model, const GeneratorSpec& generator,
                                        int n, int m, double r, std::uint64_t seed, int workers) {
  if (n < 1 || m < 1) throw ConfigError("decomposition check needs n, m >= 1");
  if (!generator.has_oracle())
    throw UnsupportedMetricError("decomposition check requires a ground-truth oracle");
  if (!(r > 0.0)) throw ConfigError("decomposition check requires r > 0");

  struct PerSample {
    char wrong = 0;
    char model_flip = 0;
    char oracle_flip = 0;
    char viol_m0 = 0;
    char viol_m1 = 0;
  };
  std::vector<PerSample> rows(n);

  parallel_for(n, workers, [&](std::int64_t i) {
    RngStream rng(seed, stream_id(kNominalBlock, i));
    const Label psi = rng.uniform_int(generator.class_count());
    const Vector x = generator.sample_class(psi, rng);
    const Label pred = model.predict(x);
    const Label truth = generator.ground_truth(x);
    PerSample& row = rows[i];
    row.wrong = pred != truth ? 1 : 0;
    const PerturbationBall ball{x, r, BallNorm::Linf};
    RngStream probe_rng(seed, stream_id(kProbeBlock, i));
    for (int j = 0; j < m; ++j) {
      const Vector xp = sample_ball_point(ball, probe_rng);
      const Label pred_p = model.predict(xp);
      const Label truth_p = generator.ground_truth(xp);
      if (pred_p != pred) row.model_flip = 1;
      if (truth_p != truth) row.oracle_flip = 1;
      if (pred_p != truth_p) row.viol_m0 = 1;
      if (pred_p != truth) row.viol_m1 = 1;
    }
  });

  int c_wrong = 0, c_b = 0, c_gb = 0, c_m0 = 0, c_m1 = 0, c_m2 = 0;
  for (const PerSample& row : rows) {
    c_wrong += row.wrong;
    if (!row.wrong && row.model_flip) ++c_b;
    if (!row.wrong && row.oracle_flip && !row.model_flip) ++c_gb;
    c_m0 += row.viol_m0;
    c_m1 += row.viol_m1;
    c_m2 += row.model_flip;  // m2 violation ignores correctness
  }

  DecompositionReport rep;
  rep.samples = n;
  rep.probes_per_sample = m;
  rep.detector = "naive_mc";
  rep.forward_passes = static_cast<std::int64_t>(n) * (m + 1);
  rep.r_c = binomial_estimate(c_wrong, n);
  rep.r_b = binomial_estimate(c_b, n);
  rep.r_gb = binomial_estimate(c_gb, n);
  rep.r_rob_m0 = binomial_estimate(c_m0, n);
  rep.r_rob_m1 = binomial_estimate(c_m1, n);
  rep.r_rob_m2 = binomial_estimate(c_m2, n);
  rep.residual_m0 = rep.r_rob_m0.value - (rep.r_c.value + rep.r_b.value + rep.r_gb.value);
  rep.residual_m1 = rep.r_rob_m1.value - (rep.r_c.value + rep.r_b.value);
  rep.residual_m2 = rep.r_rob_m2.value - (rep.r_c.value + rep.r_b.value);
  const auto comb = [](const RiskEstimate& a, const RiskEstimate& b, const RiskEstimate& c) {
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error +
                     c.std_error * c.std_error);
  };
  rep.combined_se_m1 = comb(rep.r_rob_m1, rep.r_c, rep.r_b);
  rep.combined_se_m2 = comb(rep.r_rob_m2, rep.r_c, rep.r_b);
  return rep;
}

}  // namespace grcert
