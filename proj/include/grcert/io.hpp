#ifndef GRCERT_IO_HPP
#define GRCERT_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grcert/bench.hpp"
#include "grcert/curve.hpp"
#include "grcert/generator.hpp"
#include "grcert/model.hpp"
#include "grcert/pipeline.hpp"
#include "grcert/risk_decomposition.hpp"

namespace grcert {

// model JSON: {"input_dim", "num_classes", "layers": [{"weights": [[...]],
// "bias": [...], "activation": "relu"|"tanh"|"identity"}]}; row-major weights,
// layer order input to output
MlpModel load_model(const std::filesystem::path& path);
void save_model(const MlpModel& model, const std::filesystem::path& path);

// generator JSON: {"class_count", "output_dim", "classes": [{"stages": [...]}],
// "oracle": {"type": "nearest_template", "templates": [[...]]},
// "separation_margin"}
GeneratorSpec load_generator(const std::filesystem::path& path);
void save_generator(const GeneratorSpec& gen, const std::filesystem::path& path);

// curve CSV: header index,mu_hat,sigma_hat,method
void write_curve_csv(const CumulativeRobustnessCurve& curve, const std::filesystem::path& path);
CumulativeRobustnessCurve read_curve_csv(const std::filesystem::path& path);

// sampled rendering: header t,R_t over a log-spaced grid
void write_curve_grid_csv(const CumulativeRobustnessCurve& curve, const std::vector<double>& grid,
                          const std::filesystem::path& path);

std::string report_to_json(const CertificationReport& report, const CertificationConfig& cfg,
                           const std::string& curve_ref);
void write_report_json(const CertificationReport& report, const CertificationConfig& cfg,
                       const std::string& curve_ref, const std::filesystem::path& path);

std::string decomposition_to_json(const DecompositionReport& report);

// bench CSV: method,N,N0,runtime_s then mean/sd per threshold; unresolvable
// cells are left empty
void write_bench_csv(const std::vector<BenchRow>& rows, const std::vector<double>& thresholds,
                     const std::filesystem::path& path);

// counterexample archive: one JSON object per line
void write_counterexamples_jsonl(const std::vector<CounterexampleRecord>& records,
                                 const std::filesystem::path& path);
std::vector<CounterexampleRecord> read_counterexamples_jsonl(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;
  std::string hash;  // fnv1a64 of the file contents, hex
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string created_at;  // the only timestamp any artifact carries
  double runtime_seconds = 0.0;
  std::vector<ManifestEntry> artifacts;
};

void add_artifact(RunManifest& manifest, const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace grcert

#endif
