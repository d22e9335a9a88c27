#include "grcert/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "grcert/errors.hpp"
#include "grcert/hash.hpp"

namespace grcert {

using nlohmann::json;

namespace {

// fixed shortest-round-trip formatting so artifacts are byte-stable
std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number: '" + s + "'");
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(where + " rows must be non-empty arrays");
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(where + " rows must all have the same length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const VectorRef& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json matrix_to_json(const MatrixRef& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

std::string method_name(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::NaiveMC: return "naive_mc";
    case EstimateMethod::ParamEst: return "predicted";
    case EstimateMethod::AMLS: return "amls";
  }
  return "amls";
}

EstimateMethod method_from_name(const std::string& s) {
  if (s == "naive_mc") return EstimateMethod::NaiveMC;
  if (s == "predicted") return EstimateMethod::ParamEst;
  if (s == "amls") return EstimateMethod::AMLS;
  throw ConfigError("unknown curve entry method: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + path.string());
  out << content;
  if (!out) throw PipelineError("failed writing " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  if (!j.contains("layers") || !j["layers"].is_array() || j["layers"].empty())
    throw ConfigError(path.string() + ": model needs a non-empty layers array");
  std::vector<MlpLayer> layers;
  for (std::size_t k = 0; k < j["layers"].size(); ++k) {
    const json& jl = j["layers"][k];
    const std::string where = path.string() + ": layer " + std::to_string(k);
    MlpLayer layer;
    layer.weights = matrix_from_json(jl.at("weights"), where + " weights");
    layer.bias = vector_from_json(jl.at("bias"), where + " bias");
    layer.activation = activation_from_string(jl.value("activation", "identity"));
    layers.push_back(std::move(layer));
  }
  MlpModel model(std::move(layers));
  if (j.contains("input_dim") && j["input_dim"].get<Eigen::Index>() != model.input_dim())
    throw ConfigError(path.string() + ": input_dim does not match first layer");
  if (j.contains("num_classes") && j["num_classes"].get<Eigen::Index>() != model.num_classes())
    throw ConfigError(path.string() + ": num_classes does not match last layer");
  return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  json j;
  j["input_dim"] = model.input_dim();
  j["num_classes"] = model.num_classes();
  j["layers"] = json::array();
  for (const MlpLayer& layer : model.layers()) {
    json jl;
    jl["weights"] = matrix_to_json(layer.weights);
    jl["bias"] = vector_to_json(layer.bias);
    jl["activation"] = to_string(layer.activation);
    j["layers"].push_back(std::move(jl));
  }
  write_text_file(path, j.dump(2) + "\n");
}

namespace {

Stage stage_from_json(const json& js, const std::string& where) {
  const std::string type = js.value("type", "");
  if (type == "gaussian")
    return GaussianStage{vector_from_json(js.at("mean"), where + " mean"),
                         vector_from_json(js.at("stddev"), where + " stddev")};
  if (type == "uniform")
    return UniformStage{vector_from_json(js.at("lo"), where + " lo"),
                        vector_from_json(js.at("hi"), where + " hi")};
  if (type == "affine")
    return AffineStage{matrix_from_json(js.at("matrix"), where + " matrix"),
                       vector_from_json(js.at("offset"), where + " offset")};
  if (type == "clamp")
    return ClampStage{vector_from_json(js.at("lo"), where + " lo"),
                      vector_from_json(js.at("hi"), where + " hi")};
  throw ConfigError(where + ": unknown stage type '" + type + "'");
}

json stage_to_json(const Stage& stage) {
  json j;
  if (const auto* g = std::get_if<GaussianStage>(&stage)) {
    j["type"] = "gaussian";
    j["mean"] = vector_to_json(g->mean);
    j["stddev"] = vector_to_json(g->stddev);
  } else if (const auto* u = std::get_if<UniformStage>(&stage)) {
    j["type"] = "uniform";
    j["lo"] = vector_to_json(u->lo);
    j["hi"] = vector_to_json(u->hi);
  } else if (const auto* a = std::get_if<AffineStage>(&stage)) {
    j["type"] = "affine";
    j["matrix"] = matrix_to_json(a->matrix);
    j["offset"] = vector_to_json(a->offset);
  } else {
    const auto& c = std::get<ClampStage>(stage);
    j["type"] = "clamp";
    j["lo"] = vector_to_json(c.lo);
    j["hi"] = vector_to_json(c.hi);
  }
  return j;
}

}  // namespace

GeneratorSpec load_generator(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  const std::string where = path.string();
  if (!j.contains("classes") || !j["classes"].is_array() || j["classes"].empty())
    throw ConfigError(where + ": generator needs a non-empty classes array");
  std::vector<ClassHierarchy> classes;
  for (std::size_t c = 0; c < j["classes"].size(); ++c) {
    const json& jc = j["classes"][c];
    ClassHierarchy hierarchy;
    if (!jc.contains("stages") || !jc["stages"].is_array())
      throw ConfigError(where + ": class " + std::to_string(c) + " needs a stages array");
    for (std::size_t s = 0; s < jc["stages"].size(); ++s) {
      hierarchy.stages.push_back(stage_from_json(
          jc["stages"][s], where + ": class " + std::to_string(c) + " stage " + std::to_string(s)));
    }
    classes.push_back(std::move(hierarchy));
  }
  std::optional<NearestTemplateOracle> oracle;
  if (j.contains("oracle") && !j["oracle"].is_null()) {
    const json& jo = j["oracle"];
    if (jo.value("type", "") != "nearest_template")
      throw ConfigError(where + ": unknown oracle type");
    NearestTemplateOracle o;
    for (const json& t : jo.at("templates")) o.templates.push_back(vector_from_json(t, where + ": template"));
    oracle = std::move(o);
  }
  if (!j.contains("output_dim")) throw ConfigError(where + ": output_dim is required");
  GeneratorSpec gen(j["output_dim"].get<Eigen::Index>(), std::move(classes), std::move(oracle),
                    j.value("separation_margin", 0.0));
  if (j.contains("class_count") && j["class_count"].get<int>() != gen.class_count())
    throw ConfigError(where + ": class_count does not match classes array");
  return gen;
}

void save_generator(const GeneratorSpec& gen, const std::filesystem::path& path) {
  json j;
  j["class_count"] = gen.class_count();
  j["output_dim"] = gen.output_dim();
  j["separation_margin"] = gen.separation_margin();
  j["classes"] = json::array();
  for (const ClassHierarchy& hierarchy : gen.classes()) {
    json jc;
    jc["stages"] = json::array();
    for (const Stage& stage : hierarchy.stages) jc["stages"].push_back(stage_to_json(stage));
    j["classes"].push_back(std::move(jc));
  }
  if (gen.oracle()) {
    json jo;
    jo["type"] = "nearest_template";
    jo["templates"] = json::array();
    for (const Vector& t : gen.oracle()->templates) jo["templates"].push_back(vector_to_json(t));
    j["oracle"] = std::move(jo);
  } else {
    j["oracle"] = nullptr;
  }
  write_text_file(path, j.dump(2) + "\n");
}

void write_curve_csv(const CumulativeRobustnessCurve& curve, const std::filesystem::path& path) {
  std::string out = "index,mu_hat,sigma_hat,method\n";
  for (std::size_t i = 0; i < curve.entries.size(); ++i) {
    const CurveEntry& e = curve.entries[i];
    out += std::to_string(i) + "," + fmt_double(e.mu_hat) + "," + fmt_double(e.sigma_hat) + "," +
           method_name(e.method) + "\n";
  }
  write_text_file(path, out);
}

CumulativeRobustnessCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,mu_hat,sigma_hat,method", 0) != 0)
    throw ConfigError(path.string() + ": expected curve CSV header index,mu_hat,sigma_hat,method");
  CumulativeRobustnessCurve curve;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    CurveEntry e;
    e.mu_hat = parse_double(fields[1]);
    e.sigma_hat = parse_double(fields[2]);
    e.method = method_from_name(fields[3]);
    curve.entries.push_back(e);
  }
  if (curve.entries.empty()) throw ConfigError(path.string() + ": curve has no entries");
  return curve;
}

void write_curve_grid_csv(const CumulativeRobustnessCurve& curve, const std::vector<double>& grid,
                          const std::filesystem::path& path) {
  std::string out = "t,R_t\n";
  for (double t : grid) {
    out += fmt_double(t) + "," + fmt_double(evaluate_curve(curve, t)) + "\n";
  }
  write_text_file(path, out);
}

std::string report_to_json(const CertificationReport& report, const CertificationConfig& cfg,
                           const std::string& curve_ref) {
  json j;
  j["config"] = {{"n_samples", cfg.n_samples},
                 {"perturbations_per_sample", cfg.perturbations_per_sample},
                 {"calibration_subset", cfg.calibration_subset},
                 {"radius", cfg.radius},
                 {"metric", to_string(cfg.metric)},
                 {"seed", cfg.seed},
                 {"rho", cfg.acceptable_error},
                 {"pac_epsilon", cfg.pac_epsilon},
                 {"pac_delta", cfg.pac_delta},
                 {"pac_sample_size", pac_sample_size(cfg.pac_epsilon, cfg.pac_delta)},
                 {"include_censored_in_regression", cfg.include_censored_in_regression},
                 {"amls",
                  {{"quantile", cfg.amls.quantile},
                   {"particles", cfg.amls.particles},
                   {"max_levels", cfg.amls.max_levels},
                   {"mh_updates_per_level", cfg.amls.mh_updates_per_level},
                   {"initial_width_fraction", cfg.amls.proposal.initial_width_fraction},
                   {"target_acceptance", cfg.amls.proposal.target_acceptance}}},
                 {"fingerprint", report.curve.config_fingerprint}};
  j["r_star"] = report.r_star;
  j["r_star_std_error"] = report.r_star_std_error;
  j["criterion_results"] = json::array();
  for (const CriterionResult& c : report.criteria) {
    j["criterion_results"].push_back({{"t", c.t},
                                      {"rho", c.rho},
                                      {"curve_value", c.curve_value},
                                      {"thresholded_risk", c.thresholded_risk},
                                      {"satisfied", c.satisfied}});
  }
  j["regression"] = {{"beta0", report.regression.beta0},
                     {"beta1", report.regression.beta1},
                     {"r_squared", report.regression.r_squared},
                     {"residual_std", report.regression.residual_std},
                     {"n_points", report.regression.n_points}};
  j["budget"] = {{"stats_margin_evals", report.budget.stats_margin_evals},
                 {"amls_margin_evals", report.budget.amls_margin_evals},
                 {"report_forward_evals", report.budget.report_forward_evals},
                 {"oracle_evals", report.budget.oracle_evals},
                 {"total_forward_passes", report.budget.total_forward_passes()}};
  j["counterexample_count"] = report.counterexamples.size();
  j["curve_ref"] = curve_ref;
  return j.dump(2) + "\n";
}

void write_report_json(const CertificationReport& report, const CertificationConfig& cfg,
                       const std::string& curve_ref, const std::filesystem::path& path) {
  write_text_file(path, report_to_json(report, cfg, curve_ref));
}

std::string decomposition_to_json(const DecompositionReport& report) {
  json j;
  const auto est = [](const RiskEstimate& e) {
    return json{{"value", e.value}, {"std_error", e.std_error}, {"count", e.count}};
  };
  j["r_c"] = est(report.r_c);
  j["r_b"] = est(report.r_b);
  j["r_gb"] = est(report.r_gb);
  j["r_rob_m0"] = est(report.r_rob_m0);
  j["r_rob_m1"] = est(report.r_rob_m1);
  j["r_rob_m2"] = est(report.r_rob_m2);
  j["residuals"] = {{"m0", report.residual_m0}, {"m1", report.residual_m1}, {"m2", report.residual_m2}};
  j["combined_se"] = {{"m1", report.combined_se_m1}, {"m2", report.combined_se_m2}};
  j["detector"] = report.detector;
  j["budget"] = report.forward_passes;
  j["samples"] = report.samples;
  j["probes_per_sample"] = report.probes_per_sample;
  return j.dump(2) + "\n";
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::vector<double>& thresholds,
                     const std::filesystem::path& path) {
  std::string out = "method,N,N0,runtime_s";
  for (double t : thresholds) {
    const std::string tag = fmt_double(t);
    out += ",mean_t" + tag + ",sd_t" + tag;
  }
  out += "\n";
  for (const BenchRow& row : rows) {
    out += row.method + "," + std::to_string(row.n) + ",";
    out += row.n0 > 0 ? std::to_string(row.n0) : "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", row.runtime_seconds);
    out += std::string(",") + buf;
    for (const BenchCell& cell : row.cells) {
      if (cell.degenerate) {
        out += ",,";  // mirrors an unresolvable table entry
      } else {
        out += "," + fmt_double(cell.mean) + ",";
        out += std::isnan(cell.sd) ? "" : fmt_double(cell.sd);
      }
    }
    out += "\n";
  }
  write_text_file(path, out);
}

void write_counterexamples_jsonl(const std::vector<CounterexampleRecord>& records,
                                 const std::filesystem::path& path) {
  std::string out;
  for (const CounterexampleRecord& rec : records) {
    json j;
    j["nominal_index"] = rec.nominal_index;
    j["nominal"] = vector_to_json(rec.nominal);
    j["perturbed"] = vector_to_json(rec.perturbed);
    j["nominal_prediction"] = rec.nominal_prediction;
    j["perturbed_prediction"] = rec.perturbed_prediction;
    if (rec.ground_truth) {
      j["ground_truth"] = *rec.ground_truth;
    } else {
      j["ground_truth"] = nullptr;
    }
    j["margin"] = rec.margin;
    j["log_risk"] = rec.log_risk;
    j["metric"] = to_string(rec.metric);
    j["radius"] = rec.radius;
    out += j.dump() + "\n";
  }
  write_text_file(path, out);
}

std::vector<CounterexampleRecord> read_counterexamples_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<CounterexampleRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    CounterexampleRecord rec;
    rec.nominal_index = j.at("nominal_index").get<int>();
    rec.nominal = vector_from_json(j.at("nominal"), "nominal");
    rec.perturbed = vector_from_json(j.at("perturbed"), "perturbed");
    rec.nominal_prediction = j.at("nominal_prediction").get<Label>();
    rec.perturbed_prediction = j.at("perturbed_prediction").get<Label>();
    if (!j.at("ground_truth").is_null()) rec.ground_truth = j["ground_truth"].get<Label>();
    rec.margin = j.at("margin").get<double>();
    rec.log_risk = j.at("log_risk").get<double>();
    rec.metric = metric_from_string(j.at("metric").get<std::string>());
    rec.radius = j.at("radius").get<double>();
    records.push_back(std::move(rec));
  }
  return records;
}

void add_artifact(RunManifest& manifest, const std::filesystem::path& path) {
  manifest.artifacts.push_back({path.string(), to_hex(fnv1a64(read_text_file(path)))});
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config_path;
  j["seed"] = manifest.seed;
  j["out_dir"] = manifest.out_dir;
  j["created_at"] = manifest.created_at;
  j["runtime_seconds"] = manifest.runtime_seconds;
  j["artifacts"] = json::array();
  for (const ManifestEntry& entry : manifest.artifacts) {
    j["artifacts"].push_back({{"path", entry.path}, {"fnv1a64", entry.hash}});
  }
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace grcert
