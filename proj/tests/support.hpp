#ifndef GRCERT_TESTS_SUPPORT_HPP
#define GRCERT_TESTS_SUPPORT_HPP

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "grcert/generator.hpp"
#include "grcert/model.hpp"
#include "grcert/types.hpp"

namespace grcert::testing {

inline Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

// P(N(0,1) > k), precomputed independently with 50-digit arithmetic.
struct TailTableEntry {
  double k;
  double tail;
};
inline const std::vector<TailTableEntry>& normal_tail_table() {
  static const std::vector<TailTableEntry> table = {
      {-8.0, 0.999999999999999378},   {-7.5, 0.999999999999968091},
      {-7.0, 0.999999999998720187},   {-6.5, 0.999999999959839994},
      {-6.0, 0.999999999013412355},   {-5.5, 0.999999981010437534},
      {-5.0, 0.999999713348428121},   {-4.5, 0.99999660232687527},
      {-4.0, 0.99996832875816688},    {-3.5, 0.999767370920964475},
      {-3.0, 0.998650101968369905},   {-2.5, 0.993790334674223865},
      {-2.0, 0.977249868051820793},   {-1.5, 0.933192798731141934},
      {-1.0, 0.841344746068542949},   {-0.5, 0.691462461274013104},
      {0.0, 0.5},                     {0.5, 0.308537538725986896},
      {1.0, 0.158655253931457051},    {1.5, 0.066807201268858066},
      {2.0, 0.0227501319481792072},   {2.5, 0.00620966532577613517},
      {3.0, 0.00134989803163009453},  {3.5, 0.000232629079035525036},
      {4.0, 0.0000316712418331199213},{4.5, 3.3976731247300604e-6},
      {5.0, 2.86651571879193912e-7},  {5.5, 1.89895624658877194e-8},
      {6.0, 9.86587645037698141e-10}, {6.5, 4.01600058385911781e-11},
      {7.0, 1.279812543885835e-12},   {7.5, 3.19089167291089623e-14},
      {8.0, 6.22096057427178412e-16},
  };
  return table;
}

// Frozen high-precision reference points.
inline constexpr double kTail3 = 1.3498980316300945e-3;         // P(N > 3)
inline constexpr double kTail4 = 3.1671241833119921e-5;         // P(N > 4)
inline constexpr double kLogTail40 = -804.60844201375378817;    // log P(N > 40)

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16). Kept in
// test code as an oracle-side primitive independent of the library under test.
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf needs p in (0,1)");
  const double q = p - 0.5;
  auto ratio = [](const double (&num)[8], const double (&den)[8], double r) {
    double n = num[7], d = den[7];
    for (int i = 6; i >= 0; --i) {
      n = n * r + num[i];
      d = d * r + den[i];
    }
    return n / d;
  };
  static const double a[8] = {3.3871328727963666080e0, 1.3314166789178437745e2,
                              1.9715909503065514427e3, 1.3731693765509461125e4,
                              4.5921953931549871457e4, 6.7265770927008700853e4,
                              3.3430575583588128105e4, 2.5090809287301226727e3};
  static const double b[8] = {1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
                              5.3941960214247511077e3, 2.1213794301586595867e4,
                              3.9307895800092710610e4, 2.8729085735721942674e4,
                              5.2264952788528545610e3};
  static const double c[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                              5.76949722146069140550e0, 3.64784832476320460504e0,
                              1.27045825245236838258e0, 2.41780725177450611770e-1,
                              2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static const double d[8] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
                              6.89767334985100004550e-1, 1.48103976427480074590e-1,
                              1.51986665636164571966e-2, 5.47593808499534494600e-4,
                              1.05075007164441684324e-9};
  static const double e[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                              1.78482653991729133580e0, 2.96560571828504891230e-1,
                              2.65321895265761230930e-2, 1.24266094738807843860e-3,
                              2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static const double f[8] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                              1.48753612908506148525e-2, 7.86869131145613259100e-4,
                              1.84631831751005468180e-5, 1.42151175831644588870e-7,
                              2.04426310338993978564e-15};
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * ratio(a, b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    z = ratio(c, d, r - 1.6);
  } else {
    z = ratio(e, f, r - 5.0);
  }
  return q < 0.0 ? -z : z;
}

// --- shared synthetic setup: two well-separated classes in 6 dimensions ---
//
// Class templates sit at +/- 2.4u along a unit axis u, far enough from the
// ground-truth midplane (u.x = 0) that l_inf balls at the default radius 0.5
// essentially never reach it. The classifier's decision surface sits offset
// near u.x = 1.6 with a small smooth ripple from two hidden units orthogonal
// to u, so class-1 balls straddle it with local risks spread over several
// decades while class-0 samples are deep interior.

inline constexpr double kSyntheticTemplateDist = 2.4;
inline constexpr double kSyntheticStddev = 0.3;
inline constexpr double kSyntheticRadius = 0.5;

inline Vector synthetic_axis() {
  const double s = 1.0 / std::sqrt(6.0);
  return make_vector({s, s, s, s, s, s});
}

inline GeneratorSpec make_synthetic_generator(double stddev = kSyntheticStddev) {
  const Vector u = synthetic_axis();
  std::vector<ClassHierarchy> classes(2);
  classes[0].stages.push_back(
      GaussianStage{-kSyntheticTemplateDist * u, Vector::Constant(6, stddev)});
  classes[1].stages.push_back(
      GaussianStage{kSyntheticTemplateDist * u, Vector::Constant(6, stddev)});
  NearestTemplateOracle oracle;
  oracle.templates = {-kSyntheticTemplateDist * u, kSyntheticTemplateDist * u};
  // template-to-midplane distance expressed in per-coordinate stddevs
  return GeneratorSpec(6, std::move(classes), std::move(oracle),
                       kSyntheticTemplateDist / stddev);
}

inline MlpModel make_synthetic_model() {
  const Vector u = synthetic_axis();
  const double s = 1.0 / std::sqrt(6.0);
  const Vector v = make_vector({s, -s, s, -s, s, -s});
  const Vector w = make_vector({s, s, -s, -s, s, -s});
  const double gain = 0.5;
  const double boundary_offset = 1.6;
  Matrix w1(4, 6);
  w1.row(0) = gain * u.transpose();
  w1.row(1) = -gain * u.transpose();
  w1.row(2) = 0.8 * v.transpose();
  w1.row(3) = 0.8 * w.transpose();
  Vector b1 = make_vector({-gain * boundary_offset, gain * boundary_offset, 0.0, 0.0});
  Matrix w2(2, 4);
  w2 << -1.0, 1.0, 0.05, 0.04,
         1.0, -1.0, -0.05, -0.04;
  std::vector<MlpLayer> layers;
  layers.push_back({w1, b1, Activation::Tanh});
  layers.push_back({w2, Vector::Zero(2), Activation::Identity});
  return MlpModel(std::move(layers));
}

// --- 1-D linear construction: uniform nominals on [-1, 1], boundary at x = 0 ---

inline GeneratorSpec make_line_generator() {
  std::vector<ClassHierarchy> classes(2);
  classes[0].stages.push_back(UniformStage{make_vector({-1.0}), make_vector({0.0})});
  classes[1].stages.push_back(UniformStage{make_vector({0.0}), make_vector({1.0})});
  NearestTemplateOracle oracle;
  oracle.templates = {make_vector({-0.5}), make_vector({0.5})};
  return GeneratorSpec(1, std::move(classes), std::move(oracle), 0.0);
}

// Linear two-class model with its boundary at x = shift.
inline MlpModel make_line_model(double shift = 0.0) {
  std::vector<MlpLayer> layers;
  layers.push_back(
      {make_matrix({{-1.0}, {1.0}}), make_vector({shift, -shift}), Activation::Identity});
  return MlpModel(std::move(layers));
}

// Classifier whose output never changes: scores constant in x.
inline MlpModel make_constant_model(Eigen::Index input_dim) {
  std::vector<MlpLayer> layers;
  layers.push_back({Matrix::Zero(2, input_dim), make_vector({1.0, 0.0}), Activation::Identity});
  return MlpModel(std::move(layers));
}

}  // namespace grcert::testing

#endif
