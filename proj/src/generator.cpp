#include "grcert/generator.hpp"

#include <limits>
#include <string>

#include "grcert/errors.hpp"

namespace grcert {

namespace {

Eigen::Index stage_output_dim(const Stage& stage, Eigen::Index prev_dim, std::size_t index) {
  const std::string where = "stage " + std::to_string(index);
  if (const auto* g = std::get_if<GaussianStage>(&stage)) {
    if (g->mean.size() != g->stddev.size())
      throw ConfigError(where + ": gaussian mean/stddev sizes differ");
    if (!(g->stddev.array() > 0.0).all())
      throw ConfigError(where + ": gaussian stddev entries must be positive");
    if (prev_dim > 0 && g->mean.size() != prev_dim)
      throw ConfigError(where + ": gaussian dimension does not match previous stage");
    return g->mean.size();
  }
  if (const auto* u = std::get_if<UniformStage>(&stage)) {
    if (u->lo.size() != u->hi.size()) throw ConfigError(where + ": uniform lo/hi sizes differ");
    if (!(u->lo.array() < u->hi.array()).all())
      throw ConfigError(where + ": uniform bounds need lo < hi");
    if (prev_dim > 0 && u->lo.size() != prev_dim)
      throw ConfigError(where + ": uniform dimension does not match previous stage");
    return u->lo.size();
  }
  if (const auto* a = std::get_if<AffineStage>(&stage)) {
    if (prev_dim == 0) throw ConfigError(where + ": affine stage cannot come first");
    if (a->matrix.cols() != prev_dim)
      throw ConfigError(where + ": affine matrix columns do not match previous stage");
    if (a->offset.size() != a->matrix.rows())
      throw ConfigError(where + ": affine offset size does not match matrix rows");
    return a->matrix.rows();
  }
  const auto& c = std::get<ClampStage>(stage);
  if (prev_dim == 0) throw ConfigError(where + ": clamp stage cannot come first");
  if (c.lo.size() != prev_dim || c.hi.size() != prev_dim)
    throw ConfigError(where + ": clamp bounds do not match previous stage dimension");
  if (!(c.lo.array() < c.hi.array()).all()) throw ConfigError(where + ": clamp needs lo < hi");
  return prev_dim;
}

}  // namespace

GeneratorSpec::GeneratorSpec(Eigen::Index output_dim, std::vector<ClassHierarchy> classes,
                             std::optional<NearestTemplateOracle> oracle, double separation_margin)
    : output_dim_(output_dim),
      classes_(std::move(classes)),
      oracle_(std::move(oracle)),
      separation_margin_(separation_margin) {
  if (output_dim_ <= 0) throw ConfigError("generator output_dim must be positive");
  if (classes_.empty()) throw ConfigError("generator needs at least one class");
  if (separation_margin_ < 0.0) throw ConfigError("separation_margin must be nonnegative");
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const auto& stages = classes_[c].stages;
    if (stages.empty())
      throw ConfigError("class " + std::to_string(c) + " has no stages");
    Eigen::Index dim = 0;
    for (std::size_t s = 0; s < stages.size(); ++s) dim = stage_output_dim(stages[s], dim, s);
    if (dim != output_dim_)
      throw ConfigError("class " + std::to_string(c) + " hierarchy ends with dimension " +
                        std::to_string(dim) + ", expected " + std::to_string(output_dim_));
  }
  if (oracle_) {
    if (oracle_->templates.size() != classes_.size())
      throw ConfigError("oracle template count must equal class_count");
    for (const Vector& t : oracle_->templates) {
      if (t.size() != output_dim_) throw ConfigError("oracle template dimension mismatch");
    }
  }
}

Label GeneratorSpec::ground_truth(const VectorRef& x) const {
  if (!oracle_) throw UnsupportedMetricError("generator declares no ground-truth oracle");
  if (x.size() != output_dim_) throw ConfigError("ground_truth input dimension mismatch");
  Label best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < oracle_->templates.size(); ++k) {
    const double d = (x - oracle_->templates[k]).squaredNorm();
    if (d < best_dist) {  // strict < keeps the lowest index on ties
      best_dist = d;
      best = static_cast<Label>(k);
    }
  }
  return best;
}

GroundTruthFn GeneratorSpec::ground_truth_fn() const {
  const GeneratorSpec* self = this;
  return [self](const VectorRef& x) { return self->ground_truth(x); };
}

Vector GeneratorSpec::sample_class(Label psi, RngStream& rng) const {
  if (psi < 0 || psi >= class_count())
    throw ConfigError("class index " + std::to_string(psi) + " out of range");
  Vector v;
  for (const Stage& stage : classes_[psi].stages) {
    if (const auto* g = std::get_if<GaussianStage>(&stage)) {
      Vector draw(g->mean.size());
      for (Eigen::Index k = 0; k < draw.size(); ++k)
        draw[k] = g->mean[k] + g->stddev[k] * rng.gaussian();
      v = v.size() == 0 ? draw : Vector(v + draw);
    } else if (const auto* u = std::get_if<UniformStage>(&stage)) {
      Vector draw(u->lo.size());
      for (Eigen::Index k = 0; k < draw.size(); ++k) draw[k] = rng.uniform(u->lo[k], u->hi[k]);
      v = v.size() == 0 ? draw : Vector(v + draw);
    } else if (const auto* a = std::get_if<AffineStage>(&stage)) {
      v = (a->matrix * v + a->offset).eval();
    } else {
      const auto& c = std::get<ClampStage>(stage);
      v = v.cwiseMax(c.lo).cwiseMin(c.hi);
    }
  }
  return v;
}

SampleBatch sample_nominal(const GeneratorSpec& gen, Label cls, int count,
                           std::uint64_t master_seed, std::uint64_t base_stream) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  if (cls != kAllClasses && (cls < 0 || cls >= gen.class_count()))
    throw ConfigError("class index " + std::to_string(cls) + " out of range");
  SampleBatch batch;
  batch.seed = master_seed;
  batch.nominals.reserve(count);
  batch.labels.reserve(count);
  for (int i = 0; i < count; ++i) {
    RngStream rng(master_seed, base_stream + static_cast<std::uint64_t>(i));
    const Label psi = cls == kAllClasses ? rng.uniform_int(gen.class_count()) : cls;
    batch.nominals.push_back(gen.sample_class(psi, rng));
    batch.labels.push_back(psi);
  }
  return batch;
}

}  // namespace grcert
