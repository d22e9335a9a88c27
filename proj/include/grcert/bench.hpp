#ifndef GRCERT_BENCH_HPP
#define GRCERT_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "grcert/generator.hpp"
#include "grcert/local_risk.hpp"
#include "grcert/model.hpp"
#include "grcert/pipeline.hpp"

namespace grcert {

enum class BenchMethod { NaiveMc, Amls, Ace };

BenchMethod bench_method_from_string(const std::string& name);
std::string to_string(BenchMethod m);

struct BenchConfig {
  std::vector<BenchMethod> methods;
  int repetitions = 1;
  std::vector<double> thresholds = {1e-5, 1e-10, 1e-15};
  double radius = 0.1;
  Metric metric = Metric::M2;
  AMLSConfig amls;
  std::uint64_t seed = 0;
  int workers = 0;

  // ACE shape; also defines the reference budget when budget_forward_passes == 0
  int ace_n = 100;
  int ace_m = 200;
  int ace_n0 = 20;

  int naive_m = 100000;  // perturbations per sample for the naive baseline

  // naive MC / AMLS-only consume samples until this budget is exhausted;
  // 0 means "match the measured cost of the first ACE repetition"
  std::int64_t budget_forward_passes = 0;

  void validate() const;
};

struct BenchCell {
  double mean = 0.0;
  double sd = 0.0;              // NaN with a single repetition
  bool degenerate = false;      // method cannot resolve risks at this threshold
  std::vector<double> per_rep;  // estimate per repetition
};

struct BenchRow {
  std::string method;
  int n = 0;                    // nominal samples per repetition (avg for budgeted methods)
  int n0 = 0;                   // splitting executions per repetition
  double runtime_seconds = 0.0; // average per repetition
  std::int64_t forward_passes = 0;  // average per repetition
  std::vector<BenchCell> cells;     // one per threshold
};

// Three-way method comparison at the configured thresholds; one row per
// method, mean/SD over repetitions per threshold.
std::vector<BenchRow> run_bench(const MlpModel& model, const GeneratorSpec& generator,
                                const BenchConfig& cfg);

}  // namespace grcert

#endif
