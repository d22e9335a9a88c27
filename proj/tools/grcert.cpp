#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grcert/bench.hpp"
#include "grcert/errors.hpp"
#include "grcert/flatconfig.hpp"
#include "grcert/io.hpp"
#include "grcert/mining.hpp"
#include "grcert/pipeline.hpp"

namespace fs = std::filesystem;
using namespace grcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCriterionFailed = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<double> thresholds;
  bool fail_on_criterion = false;
};

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path resolve_relative(const fs::path& config_path, const std::string& value) {
  fs::path p(value);
  if (p.is_absolute()) return p;
  return config_path.parent_path() / p;
}

AMLSConfig amls_config_from(const FlatConfig& fc) {
  AMLSConfig amls;
  amls.quantile = fc.get_double("amls_quantile", amls.quantile);
  amls.particles = static_cast<int>(fc.get_int("amls_particles", amls.particles));
  amls.max_levels = static_cast<int>(fc.get_int("amls_max_levels", amls.max_levels));
  amls.mh_updates_per_level =
      static_cast<int>(fc.get_int("amls_mh_updates", amls.mh_updates_per_level));
  amls.proposal.initial_width_fraction =
      fc.get_double("amls_initial_width_fraction", amls.proposal.initial_width_fraction);
  amls.proposal.target_acceptance =
      fc.get_double("amls_target_acceptance", amls.proposal.target_acceptance);
  return amls;
}

CertificationConfig certification_config_from(const FlatConfig& fc, const CommonOpts& opts) {
  CertificationConfig cfg;
  cfg.n_samples = static_cast<int>(fc.get_int("n_samples"));
  cfg.perturbations_per_sample = static_cast<int>(fc.get_int("perturbations_per_sample"));
  cfg.calibration_subset = static_cast<int>(fc.get_int("amls_subset"));
  cfg.radius = fc.get_double("radius");
  cfg.metric = metric_from_string(fc.get_string("metric", "m2"));
  cfg.amls = amls_config_from(fc);
  cfg.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(fc.get_int("seed", 0));
  cfg.acceptable_error = fc.get_double("rho", 0.0);
  cfg.pac_epsilon = fc.get_double("epsilon", cfg.pac_epsilon);
  cfg.pac_delta = fc.get_double("delta", cfg.pac_delta);
  if (!opts.thresholds.empty()) {
    cfg.thresholds = opts.thresholds;
  } else if (fc.has("thresholds")) {
    cfg.thresholds = fc.get_double_list("thresholds");
  }
  cfg.include_censored_in_regression = fc.get_bool("include_censored", false);
  cfg.workers = opts.workers ? *opts.workers : static_cast<int>(fc.get_int("workers", 0));
  return cfg;
}

void load_model_and_generator(const FlatConfig& fc, const fs::path& config_path, MlpModel** model,
                              GeneratorSpec** generator) {
  static std::optional<MlpModel> model_storage;
  static std::optional<GeneratorSpec> generator_storage;
  model_storage.emplace(load_model(resolve_relative(config_path, fc.get_string("model"))));
  generator_storage.emplace(
      load_generator(resolve_relative(config_path, fc.get_string("generator"))));
  *model = &*model_storage;
  *generator = &*generator_storage;
}

RunManifest make_manifest(const std::string& command, const CommonOpts& opts, std::uint64_t seed,
                          double runtime_seconds) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config_path = opts.config_path;
  manifest.seed = seed;
  manifest.out_dir = opts.out_dir;
  manifest.created_at = utc_now_iso8601();
  manifest.runtime_seconds = runtime_seconds;
  return manifest;
}

int cmd_certify(const CommonOpts& opts) {
  const fs::path config_path(opts.config_path);
  const FlatConfig fc = FlatConfig::parse_file(config_path);
  MlpModel* model = nullptr;
  GeneratorSpec* generator = nullptr;
  load_model_and_generator(fc, config_path, &model, &generator);
  const CertificationConfig cfg = certification_config_from(fc, opts);

  const CertificationReport report = run_certification(*model, *generator, cfg);

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  const fs::path curve_path = out / "curve.csv";
  const fs::path grid_path = out / "curve_grid.csv";
  const fs::path report_path = out / "report.json";
  const fs::path manifest_path = out / "manifest.json";

  write_curve_csv(report.curve, curve_path);
  const double grid_min = fc.get_double("grid_min", 1e-16);
  const int grid_points = static_cast<int>(fc.get_int("grid_points", 50));
  write_curve_grid_csv(report.curve, log_spaced_grid(grid_min, 1.0, grid_points), grid_path);
  write_report_json(report, cfg, curve_path.filename().string(), report_path);

  RunManifest manifest = make_manifest("certify", opts, cfg.seed, report.runtime_seconds);
  add_artifact(manifest, report_path);
  add_artifact(manifest, curve_path);
  add_artifact(manifest, grid_path);
  write_manifest(manifest, manifest_path);

  bool all_satisfied = true;
  for (const CriterionResult& c : report.criteria) {
    std::printf("t=%-12g rho=%-8g R(t)=%-10.6f risk=%-10.6f %s\n", c.t, c.rho, c.curve_value,
                c.thresholded_risk, c.satisfied ? "satisfied" : "NOT satisfied");
    all_satisfied = all_satisfied && c.satisfied;
  }
  std::printf("report: %s\n", report_path.string().c_str());
  if (opts.fail_on_criterion && !all_satisfied) return kExitCriterionFailed;
  return kExitOk;
}

int cmd_bench(const CommonOpts& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path config_path(opts.config_path);
  const FlatConfig fc = FlatConfig::parse_file(config_path);
  MlpModel* model = nullptr;
  GeneratorSpec* generator = nullptr;
  load_model_and_generator(fc, config_path, &model, &generator);

  BenchConfig cfg;
  for (const std::string& name : fc.get_string_list("methods"))
    cfg.methods.push_back(bench_method_from_string(name));
  cfg.repetitions = static_cast<int>(fc.get_int("repetitions", 1));
  if (!opts.thresholds.empty()) {
    cfg.thresholds = opts.thresholds;
  } else if (fc.has("thresholds")) {
    cfg.thresholds = fc.get_double_list("thresholds");
  }
  cfg.radius = fc.get_double("radius");
  cfg.metric = metric_from_string(fc.get_string("metric", "m2"));
  cfg.amls = amls_config_from(fc);
  cfg.seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(fc.get_int("seed", 0));
  cfg.workers = opts.workers ? *opts.workers : static_cast<int>(fc.get_int("workers", 0));
  cfg.ace_n = static_cast<int>(fc.get_int("n_samples"));
  cfg.ace_m = static_cast<int>(fc.get_int("perturbations_per_sample"));
  cfg.ace_n0 = static_cast<int>(fc.get_int("amls_subset"));
  cfg.naive_m = static_cast<int>(fc.get_int("naive_m", cfg.naive_m));
  cfg.budget_forward_passes = fc.get_int("budget", 0);

  const std::vector<BenchRow> rows = run_bench(*model, *generator, cfg);

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  const fs::path bench_path = out / "bench.csv";
  write_bench_csv(rows, cfg.thresholds, bench_path);

  for (const BenchRow& row : rows) {
    std::printf("%-9s N=%-6d N0=%-5d runtime=%.3fs forward_passes=%lld\n", row.method.c_str(),
                row.n, row.n0, row.runtime_seconds,
                static_cast<long long>(row.forward_passes));
  }
  std::printf("table: %s\n", bench_path.string().c_str());

  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunManifest manifest = make_manifest("bench", opts, cfg.seed, runtime);
  add_artifact(manifest, bench_path);
  write_manifest(manifest, out / "manifest.json");
  return kExitOk;
}

int cmd_mine(const CommonOpts& opts) {
  const fs::path config_path(opts.config_path);
  const FlatConfig fc = FlatConfig::parse_file(config_path);
  MlpModel* model = nullptr;
  GeneratorSpec* generator = nullptr;
  load_model_and_generator(fc, config_path, &model, &generator);
  const CertificationConfig cfg = certification_config_from(fc, opts);

  MiningConfig mining;
  mining.merge_radius = fc.get_double("merge_radius", mining.merge_radius);
  mining.records_per_nominal =
      static_cast<int>(fc.get_int("records_per_nominal", mining.records_per_nominal));

  const CertificationReport report = run_certification(*model, *generator, cfg);
  const std::vector<CounterexampleRecord> records =
      mine_counterexamples(report.counterexamples, mining);

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  const fs::path archive_path = out / "counterexamples.jsonl";
  write_counterexamples_jsonl(records, archive_path);

  RunManifest manifest = make_manifest("mine", opts, cfg.seed, report.runtime_seconds);
  add_artifact(manifest, archive_path);
  write_manifest(manifest, out / "manifest.json");

  if (records.empty()) {
    std::printf("no counterexamples found; wrote empty archive %s\n",
                archive_path.string().c_str());
  } else {
    std::printf("mined %zu counterexamples from %zu raw records: %s\n", records.size(),
                report.counterexamples.size(), archive_path.string().c_str());
  }
  return kExitOk;
}

int cmd_amls(const CommonOpts& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path config_path(opts.config_path);
  const FlatConfig fc = FlatConfig::parse_file(config_path);
  MlpModel* model = nullptr;
  GeneratorSpec* generator = nullptr;
  load_model_and_generator(fc, config_path, &model, &generator);

  const int count = static_cast<int>(fc.get_int("amls_subset"));
  const double radius = fc.get_double("radius");
  const Metric metric = metric_from_string(fc.get_string("metric", "m2"));
  const AMLSConfig amls = amls_config_from(fc);
  const std::uint64_t seed =
      opts.seed ? *opts.seed : static_cast<std::uint64_t>(fc.get_int("seed", 0));
  if (count < 1) throw ConfigError("amls_subset must be >= 1");

  const GroundTruthFn oracle =
      generator->has_oracle() ? generator->ground_truth_fn() : GroundTruthFn();
  const GroundTruthFn* oracle_ptr = generator->has_oracle() ? &oracle : nullptr;

  std::string summary = "sample,log_risk,estimate,levels,terminated,margin_evals,counterexamples\n";
  std::string levels_jsonl;
  for (int i = 0; i < count; ++i) {
    RngStream nominal_rng(seed, (static_cast<std::uint64_t>(31) << 48) + i);
    const Label psi = nominal_rng.uniform_int(generator->class_count());
    const Vector g = generator->sample_class(psi, nominal_rng);
    const MarginFn margin_fn = make_margin_fn(*model, g, metric, oracle_ptr);
    const PerturbationBall ball{g, radius, BallNorm::Linf};
    RngStream amls_rng(seed, (static_cast<std::uint64_t>(32) << 48) + i);
    const AMLSResult res = local_amls(margin_fn, ball, amls, amls_rng);

    char line[256];
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%zu,%s,%lld,%zu\n", i, res.log_risk,
                  res.estimate(), res.levels.size(), to_string(res.terminated).c_str(),
                  static_cast<long long>(res.margin_evals), res.counterexamples.size());
    summary += line;

    const int mh = amls.mh_updates_per_level;
    const std::size_t phases = res.acceptance_rates.size() / mh;
    for (std::size_t l = 0; l < res.levels.size(); ++l) {
      double acc = 0.0, width = 0.0;
      const bool mutated = l < phases;
      if (mutated) {
        for (int s = 0; s < mh; ++s) acc += res.acceptance_rates[l * mh + s];
        acc /= mh;
        width = res.proposal_widths[(l + 1) * mh - 1];
      }
      char obj[256];
      if (mutated) {
        std::snprintf(obj, sizeof obj,
                      "{\"sample\":%d,\"level\":%.17g,\"survival_fraction\":%.17g,"
                      "\"acceptance_rate\":%.17g,\"proposal_width\":%.17g}\n",
                      i, res.levels[l], res.survival_fractions[l], acc, width);
      } else {
        std::snprintf(obj, sizeof obj,
                      "{\"sample\":%d,\"level\":%.17g,\"survival_fraction\":%.17g,"
                      "\"acceptance_rate\":null,\"proposal_width\":null}\n",
                      i, res.levels[l], res.survival_fractions[l]);
      }
      levels_jsonl += obj;
    }
  }

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  const fs::path summary_path = out / "amls_summary.csv";
  const fs::path levels_path = out / "amls_levels.jsonl";
  write_text_file(summary_path, summary);
  write_text_file(levels_path, levels_jsonl);

  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunManifest manifest = make_manifest("amls", opts, seed, runtime);
  add_artifact(manifest, summary_path);
  add_artifact(manifest, levels_path);
  write_manifest(manifest, out / "manifest.json");

  std::printf("summary: %s\n", summary_path.string().c_str());
  return kExitOk;
}

int cmd_curve(const std::string& curve_file, const std::vector<double>& t_values,
              const std::string& grid_out, int grid_points) {
  const CumulativeRobustnessCurve curve = read_curve_csv(curve_file);
  for (double t : t_values) {
    std::printf("%.17g,%.17g\n", t, evaluate_curve(curve, t));
  }
  if (!grid_out.empty()) {
    write_curve_grid_csv(curve, log_spaced_grid(1e-16, 1.0, grid_points), grid_out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical global robustness certification for black-box classifiers"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto add_common = [&](CLI::App* sub, bool with_criterion_flag) {
    sub->add_option("--config", opts.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", [&](const CLI::results_t& res) {
      opts.seed = std::stoull(res[0]);
      return true;
    }, "master seed override");
    sub->add_option("--workers", [&](const CLI::results_t& res) {
      opts.workers = std::stoi(res[0]);
      return true;
    }, "worker thread count (0 = available parallelism)");
    sub->add_option("--t", opts.thresholds, "threshold list override")->delimiter(',');
    if (with_criterion_flag)
      sub->add_flag("--fail-on-criterion", opts.fail_on_criterion,
                    "exit 3 when any robustness criterion is unsatisfied");
  };

  CLI::App* certify = app.add_subcommand("certify", "run the certification pipeline");
  add_common(certify, true);
  CLI::App* bench = app.add_subcommand("bench", "compare naive_mc / amls / ace");
  add_common(bench, false);
  CLI::App* mine = app.add_subcommand("mine", "harvest counterexamples");
  add_common(mine, false);
  CLI::App* amls = app.add_subcommand("amls", "standalone splitting runs with diagnostics");
  add_common(amls, false);

  std::string curve_file;
  std::vector<double> curve_t;
  std::string grid_out;
  int grid_points = 50;
  CLI::App* curve = app.add_subcommand("curve", "evaluate a stored curve");
  curve->add_option("curve_file", curve_file, "curve CSV produced by certify")
      ->required()
      ->check(CLI::ExistingFile);
  curve->add_option("--t", curve_t, "thresholds to evaluate")->delimiter(',')->required();
  curve->add_option("--grid", grid_out, "write a log-spaced (t, R_t) grid CSV here");
  curve->add_option("--grid-points", grid_points, "grid resolution");

  double pac_epsilon = 0.0, pac_delta = 0.0;
  CLI::App* pac = app.add_subcommand("pac-size", "Hoeffding sample size for (epsilon, delta)");
  pac->add_option("epsilon", pac_epsilon, "accuracy in (0,1]")->required();
  pac->add_option("delta", pac_delta, "confidence in (0,1]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (certify->parsed()) return cmd_certify(opts);
    if (bench->parsed()) return cmd_bench(opts);
    if (mine->parsed()) return cmd_mine(opts);
    if (amls->parsed()) return cmd_amls(opts);
    if (curve->parsed()) return cmd_curve(curve_file, curve_t, grid_out, grid_points);
    if (pac->parsed()) {
      std::printf("%d\n", pac_sample_size(pac_epsilon, pac_delta));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
