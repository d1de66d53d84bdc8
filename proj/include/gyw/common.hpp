#ifndef GYW_COMMON_HPP
#define GYW_COMMON_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace gyw {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Violated precondition or inconsistent dimensions in caller-supplied input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be used (non-finite values, zero variance, parse
/// failures).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular or rank-deficient systems and non-stationary specifications.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gyw

#endif  // GYW_COMMON_HPP
