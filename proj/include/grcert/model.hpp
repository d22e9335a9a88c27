#ifndef GRCERT_MODEL_HPP
#define GRCERT_MODEL_HPP

#include <functional>
#include <string>
#include <vector>

#include "grcert/types.hpp"

namespace grcert {

enum class Activation { Relu, Tanh, Identity };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

struct MlpLayer {
  Matrix weights;  // rows index outputs, cols index inputs
  Vector bias;
  Activation activation = Activation::Identity;
};

// Feed-forward classifier producing pre-softmax scores. Immutable after
// construction; forward/predict are pure and safe to call concurrently.
class MlpModel {
 public:
  explicit MlpModel(std::vector<MlpLayer> layers);

  Eigen::Index input_dim() const { return layers_.front().weights.cols(); }
  Eigen::Index num_classes() const { return layers_.back().weights.rows(); }
  const std::vector<MlpLayer>& layers() const { return layers_; }

  Vector forward(const VectorRef& x) const;
  Label predict(const VectorRef& x) const;

 private:
  std::vector<MlpLayer> layers_;
};

// Argmax with ties broken to the lowest index.
Label argmax_label(const VectorRef& scores);

// Which perturbed-input predicate the certification checks.
enum class Metric { M0, M1, M2 };

Metric metric_from_string(const std::string& name);
std::string to_string(Metric m);

using GroundTruthFn = std::function<Label(const VectorRef&)>;

// max_{j != reference} scores[j] - scores[reference]; >= 0 means violation.
double margin_from_scores(const VectorRef& scores, Label reference);

// Score margin of a perturbed input against the metric's reference class:
// M0 references the true label of x_perturbed, M1 the true label of x_nominal,
// M2 the predicted label of x_nominal. M0/M1 require an oracle.
double margin(const MlpModel& model, const VectorRef& x_nominal, const VectorRef& x_perturbed,
              Metric metric, const GroundTruthFn* oracle = nullptr);

using MarginFn = std::function<double(const VectorRef&)>;

// Margin closure with the nominal-dependent reference class resolved once.
// The model (and oracle, for M0) must outlive the returned function.
MarginFn make_margin_fn(const MlpModel& model, const Vector& x_nominal, Metric metric,
                        const GroundTruthFn* oracle = nullptr);

}  // namespace grcert

#endif
