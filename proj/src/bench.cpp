#include "grcert/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "grcert/ball.hpp"
#include "grcert/errors.hpp"
#include "grcert/parallel.hpp"
#include "grcert/stats.hpp"

namespace grcert {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

enum StreamBlock : std::uint64_t {
  kNominalBlock = 21,
  kProbeBlock = 22,
  kAmlsBlock = 23,
};

std::uint64_t stream_id(StreamBlock block, std::int64_t index) {
  return (static_cast<std::uint64_t>(block) << 48) + static_cast<std::uint64_t>(index);
}

std::uint64_t rep_seed(std::uint64_t master, int rep) {
  return splitmix64(splitmix64(master) + static_cast<std::uint64_t>(rep) * 0x9e3779b97f4a7c15ULL);
}

struct RepOutcome {
  std::vector<double> estimates;  // one per threshold
  int n_used = 0;
  int n0_used = 0;
  std::int64_t forward_passes = 0;
  double runtime_seconds = 0.0;
};

}  // namespace

BenchMethod bench_method_from_string(const std::string& name) {
  if (name == "naive_mc") return BenchMethod::NaiveMc;
  if (name == "amls") return BenchMethod::Amls;
  if (name == "ace") return BenchMethod::Ace;
  throw ConfigError("unknown bench method: " + name + " (expected naive_mc, amls, or ace)");
}

std::string to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::NaiveMc: return "naive_mc";
    case BenchMethod::Amls: return "amls";
    case BenchMethod::Ace: return "ace";
  }
  return "ace";
}

void BenchConfig::validate() const {
  if (methods.empty()) throw ConfigError("bench needs at least one method");
  if (repetitions < 1) throw ConfigError("bench repetitions must be >= 1");
  if (thresholds.empty()) throw ConfigError("bench needs at least one threshold");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("bench thresholds must lie in (0,1]");
  }
  if (!(radius > 0.0)) throw ConfigError("bench radius must be positive");
  if (ace_n < 3 || ace_n0 < 3 || ace_n0 > ace_n || ace_m < 2)
    throw ConfigError("bench ACE shape invalid (need N >= N0 >= 3, M >= 2)");
  if (naive_m < 1) throw ConfigError("bench naive_m must be >= 1");
  amls.validate();
}

namespace {

RepOutcome run_ace_rep(const MlpModel& model, const GeneratorSpec& generator,
                       const BenchConfig& cfg, std::uint64_t seed) {
  CertificationConfig run_cfg;
  run_cfg.n_samples = cfg.ace_n;
  run_cfg.perturbations_per_sample = cfg.ace_m;
  run_cfg.calibration_subset = cfg.ace_n0;
  run_cfg.radius = cfg.radius;
  run_cfg.metric = cfg.metric;
  run_cfg.amls = cfg.amls;
  run_cfg.seed = seed;
  run_cfg.thresholds = cfg.thresholds;
  run_cfg.workers = cfg.workers;
  const CertificationReport report = run_certification(model, generator, run_cfg);
  RepOutcome out;
  out.n_used = cfg.ace_n;
  out.n0_used = cfg.ace_n0;
  out.forward_passes = report.budget.total_forward_passes();
  out.runtime_seconds = report.runtime_seconds;
  out.estimates.reserve(cfg.thresholds.size());
  for (const CriterionResult& c : report.criteria) out.estimates.push_back(c.curve_value);
  return out;
}

RepOutcome run_naive_rep(const MlpModel& model, const GeneratorSpec& generator,
                         const BenchConfig& cfg, std::uint64_t seed, std::int64_t budget) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = std::max<std::int64_t>(1, budget / cfg.naive_m);
  const GroundTruthFn oracle =
      generator.has_oracle() ? generator.ground_truth_fn() : GroundTruthFn();
  const GroundTruthFn* oracle_ptr = generator.has_oracle() ? &oracle : nullptr;
  std::vector<double> p_hat(n);
  parallel_for(n, cfg.workers, [&](std::int64_t i) {
    RngStream nominal_rng(seed, stream_id(kNominalBlock, i));
    const Label psi = nominal_rng.uniform_int(generator.class_count());
    const Vector g = generator.sample_class(psi, nominal_rng);
    const MarginFn margin_fn = make_margin_fn(model, g, cfg.metric, oracle_ptr);
    const PerturbationBall ball{g, cfg.radius, BallNorm::Linf};
    RngStream probe_rng(seed, stream_id(kProbeBlock, i));
    p_hat[i] = naive_mc_local_risk(margin_fn, ball, cfg.naive_m, probe_rng).value;
  });
  RepOutcome out;
  out.n_used = n;
  out.forward_passes = static_cast<std::int64_t>(n) * cfg.naive_m;
  for (double t : cfg.thresholds) {
    int robust = 0;
    for (double p : p_hat)
      if (p <= t) ++robust;
    out.estimates.push_back(static_cast<double>(robust) / n);
  }
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RepOutcome run_amls_rep(const MlpModel& model, const GeneratorSpec& generator,
                        const BenchConfig& cfg, std::uint64_t seed, std::int64_t budget) {
  const auto t0 = std::chrono::steady_clock::now();
  const GroundTruthFn oracle =
      generator.has_oracle() ? generator.ground_truth_fn() : GroundTruthFn();
  const GroundTruthFn* oracle_ptr = generator.has_oracle() ? &oracle : nullptr;
  std::vector<double> log_p;
  std::int64_t spent = 0;
  // as many splitting executions as the budget allows, like a soft time limit
  for (std::int64_t i = 0; spent < budget || log_p.empty(); ++i) {
    RngStream nominal_rng(seed, stream_id(kNominalBlock, i));
    const Label psi = nominal_rng.uniform_int(generator.class_count());
    const Vector g = generator.sample_class(psi, nominal_rng);
    const MarginFn margin_fn = make_margin_fn(model, g, cfg.metric, oracle_ptr);
    const PerturbationBall ball{g, cfg.radius, BallNorm::Linf};
    RngStream amls_rng(seed, stream_id(kAmlsBlock, i));
    const AMLSResult res = local_amls(margin_fn, ball, cfg.amls, amls_rng);
    spent += res.margin_evals;
    log_p.push_back(res.log_risk);
  }
  RepOutcome out;
  out.n_used = static_cast<int>(log_p.size());
  out.n0_used = out.n_used;
  out.forward_passes = spent;
  for (double t : cfg.thresholds) {
    const double log_t = std::log(t);
    int robust = 0;
    for (double lp : log_p)
      if (lp <= log_t) ++robust;
    out.estimates.push_back(static_cast<double>(robust) / log_p.size());
  }
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

std::vector<BenchRow> run_bench(const MlpModel& model, const GeneratorSpec& generator,
                                const BenchConfig& cfg) {
  cfg.validate();
  const std::size_t n_t = cfg.thresholds.size();

  // reference budget: explicit, or the measured cost of one ACE repetition
  std::int64_t budget = cfg.budget_forward_passes;
  if (budget <= 0) budget = run_ace_rep(model, generator, cfg, rep_seed(cfg.seed, 0)).forward_passes;

  std::vector<BenchRow> rows;
  for (BenchMethod method : cfg.methods) {
    BenchRow row;
    row.method = to_string(method);
    row.cells.resize(n_t);
    double sum_runtime = 0.0;
    std::int64_t sum_evals = 0;
    double sum_n = 0.0, sum_n0 = 0.0;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t seed = rep_seed(cfg.seed, rep);
      RepOutcome out;
      switch (method) {
        case BenchMethod::Ace: out = run_ace_rep(model, generator, cfg, seed); break;
        case BenchMethod::NaiveMc: out = run_naive_rep(model, generator, cfg, seed, budget); break;
        case BenchMethod::Amls: out = run_amls_rep(model, generator, cfg, seed, budget); break;
      }
      sum_runtime += out.runtime_seconds;
      sum_evals += out.forward_passes;
      sum_n += out.n_used;
      sum_n0 += out.n0_used;
      for (std::size_t k = 0; k < n_t; ++k) row.cells[k].per_rep.push_back(out.estimates[k]);
    }
    row.runtime_seconds = sum_runtime / cfg.repetitions;
    row.forward_passes = sum_evals / cfg.repetitions;
    row.n = static_cast<int>(std::lround(sum_n / cfg.repetitions));
    row.n0 = static_cast<int>(std::lround(sum_n0 / cfg.repetitions));
    for (std::size_t k = 0; k < n_t; ++k) {
      BenchCell& cell = row.cells[k];
      cell.mean = sample_mean(cell.per_rep);
      cell.sd = cell.per_rep.size() >= 2 ? sample_stddev(cell.per_rep) : kNan;
      if (method == BenchMethod::NaiveMc) {
        // below the estimator's resolution every per-sample estimate is either
        // exactly zero or already above t
        cell.degenerate = cfg.thresholds[k] < 1.0 / cfg.naive_m;
      } else if (method == BenchMethod::Amls || method == BenchMethod::Ace) {
        const double resolution =
            std::pow(cfg.amls.quantile, static_cast<double>(cfg.amls.max_levels));
        cell.degenerate = cfg.thresholds[k] < resolution;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace grcert
