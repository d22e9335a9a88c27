#include "grcert/model.hpp"

#include <limits>

#include "grcert/errors.hpp"

namespace grcert {

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw ConfigError("unknown activation: " + name);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Metric metric_from_string(const std::string& name) {
  if (name == "m0") return Metric::M0;
  if (name == "m1") return Metric::M1;
  if (name == "m2") return Metric::M2;
  throw ConfigError("unknown robustness metric: " + name);
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::M0: return "m0";
    case Metric::M1: return "m1";
    case Metric::M2: return "m2";
  }
  return "m2";
}

MlpModel::MlpModel(std::vector<MlpLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ConfigError("model needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const MlpLayer& layer = layers_[k];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0)
      throw ConfigError("layer " + std::to_string(k) + " has an empty weight matrix");
    if (layer.bias.size() != layer.weights.rows())
      throw ConfigError("layer " + std::to_string(k) + " bias size does not match weight rows");
    if (k > 0 && layer.weights.cols() != layers_[k - 1].weights.rows())
      throw ConfigError("layer " + std::to_string(k) + " input size does not chain with previous layer");
    if (!layer.weights.allFinite() || !layer.bias.allFinite())
      throw ConfigError("layer " + std::to_string(k) + " contains non-finite parameters");
  }
  if (layers_.back().activation != Activation::Identity)
    throw ConfigError("output layer must have identity activation (scores are pre-softmax)");
  if (num_classes() < 2) throw ConfigError("model must emit at least two class scores");
}

Vector MlpModel::forward(const VectorRef& x) const {
  if (x.size() != input_dim())
    throw ConfigError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                      std::to_string(input_dim()));
  Vector v = x;
  for (const MlpLayer& layer : layers_) {
    v = (layer.weights * v + layer.bias).eval();
    switch (layer.activation) {
      case Activation::Relu: v = v.cwiseMax(0.0); break;
      case Activation::Tanh: v = v.array().tanh().matrix(); break;
      case Activation::Identity: break;
    }
  }
  return v;
}

Label MlpModel::predict(const VectorRef& x) const { return argmax_label(forward(x)); }

Label argmax_label(const VectorRef& scores) {
  Label best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = static_cast<Label>(i);
  }
  return best;
}

double margin_from_scores(const VectorRef& scores, Label reference) {
  if (reference < 0 || reference >= scores.size())
    throw ConfigError("reference class out of range");
  double best_other = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (j != reference && scores[j] > best_other) best_other = scores[j];
  }
  return best_other - scores[reference];
}

namespace {

Label reference_label(const MlpModel& model, const VectorRef& x_nominal, Metric metric,
                      const GroundTruthFn* oracle) {
  switch (metric) {
    case Metric::M1:
      if (!oracle) throw UnsupportedMetricError("metric m1 requires a ground-truth oracle");
      return (*oracle)(x_nominal);
    case Metric::M2:
      return model.predict(x_nominal);
    case Metric::M0:
      throw UnsupportedMetricError("m0 reference depends on the perturbed input");
  }
  throw UnsupportedMetricError("unknown metric");
}

}  // namespace

double margin(const MlpModel& model, const VectorRef& x_nominal, const VectorRef& x_perturbed,
              Metric metric, const GroundTruthFn* oracle) {
  if (metric == Metric::M0) {
    if (!oracle) throw UnsupportedMetricError("metric m0 requires a ground-truth oracle");
    return margin_from_scores(model.forward(x_perturbed), (*oracle)(x_perturbed));
  }
  const Label ref = reference_label(model, x_nominal, metric, oracle);
  return margin_from_scores(model.forward(x_perturbed), ref);
}

MarginFn make_margin_fn(const MlpModel& model, const Vector& x_nominal, Metric metric,
                        const GroundTruthFn* oracle) {
  if (metric == Metric::M0) {
    if (!oracle) throw UnsupportedMetricError("metric m0 requires a ground-truth oracle");
    const MlpModel* m = &model;
    const GroundTruthFn* gt = oracle;
    return [m, gt](const VectorRef& xp) {
      return margin_from_scores(m->forward(xp), (*gt)(xp));
    };
  }
  const Label ref = reference_label(model, x_nominal, metric, oracle);
  const MlpModel* m = &model;
  return [m, ref](const VectorRef& xp) { return margin_from_scores(m->forward(xp), ref); };
}

}  // namespace grcert
