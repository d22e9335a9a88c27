#ifndef GRCERT_TYPES_HPP
#define GRCERT_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace grcert {

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using VectorRef = Eigen::Ref<const Vector>;
using MatrixRef = Eigen::Ref<const Matrix>;

// Class index in [0, num_classes).
using Label = int;

}  // namespace grcert

#endif
