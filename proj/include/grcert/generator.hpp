#ifndef GRCERT_GENERATOR_HPP
#define GRCERT_GENERATOR_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "grcert/model.hpp"
#include "grcert/rng.hpp"
#include "grcert/types.hpp"

namespace grcert {

// Stages of a per-class hierarchy. The first stage must draw (gaussian or
// uniform); later draw stages act as conditional noise added to the previous
// stage's output, affine/clamp transform it.
struct GaussianStage {
  Vector mean;
  Vector stddev;
};
struct UniformStage {
  Vector lo;
  Vector hi;
};
struct AffineStage {
  Matrix matrix;
  Vector offset;
};
struct ClampStage {
  Vector lo;
  Vector hi;
};
using Stage = std::variant<GaussianStage, UniformStage, AffineStage, ClampStage>;

struct ClassHierarchy {
  std::vector<Stage> stages;
};

// Analytic ground truth: label of the nearest template in l2, ties to lowest index.
struct NearestTemplateOracle {
  std::vector<Vector> templates;
};

// Hierarchical generative characterization of the input distribution, one
// latent-stage program per class. Immutable; sampling takes explicit streams.
class GeneratorSpec {
 public:
  GeneratorSpec(Eigen::Index output_dim, std::vector<ClassHierarchy> classes,
                std::optional<NearestTemplateOracle> oracle, double separation_margin);

  int class_count() const { return static_cast<int>(classes_.size()); }
  Eigen::Index output_dim() const { return output_dim_; }
  double separation_margin() const { return separation_margin_; }
  const std::vector<ClassHierarchy>& classes() const { return classes_; }
  const std::optional<NearestTemplateOracle>& oracle() const { return oracle_; }

  bool has_oracle() const { return oracle_.has_value(); }
  Label ground_truth(const VectorRef& x) const;
  GroundTruthFn ground_truth_fn() const;

  // One forward pass of class psi's hierarchy.
  Vector sample_class(Label psi, RngStream& rng) const;

 private:
  Eigen::Index output_dim_;
  std::vector<ClassHierarchy> classes_;
  std::optional<NearestTemplateOracle> oracle_;
  double separation_margin_;
};

struct SampleBatch {
  std::vector<Vector> nominals;
  std::vector<Label> labels;
  std::uint64_t seed = 0;
};

inline constexpr Label kAllClasses = -1;

// count i.i.d. draws, sample i on stream (base_stream + i). With kAllClasses the
// class is picked uniformly per sample from the same stream.
SampleBatch sample_nominal(const GeneratorSpec& gen, Label cls, int count,
                           std::uint64_t master_seed, std::uint64_t base_stream = 0);

}  // namespace grcert

#endif
