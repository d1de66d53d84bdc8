#ifndef GYW_WEIGHTS_HPP
#define GYW_WEIGHTS_HPP

#include <cmath>
#include <string>
#include <string_view>

#include "gyw/common.hpp"

namespace gyw {

enum class Normalization { none, row, column };

std::string_view to_string(Normalization normalization);
Normalization parse_normalization(std::string_view text);

/// Spatial weight matrix with an exactly zero diagonal. The normalization tag
/// records how the constructor scaled the entries; it is metadata only and is
/// not re-applied on copy or serialization.
template <typename Scalar = double>
class WeightMatrix {
 public:
  WeightMatrix() = default;

  /// Validates squareness, finiteness and the zero diagonal.
  explicit WeightMatrix(Matrix<Scalar> entries,
                        Normalization normalization = Normalization::none)
      : entries_(std::move(entries)), normalization_(normalization) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
      throw InvalidArgument("weight matrix must be square and non-empty");
    }
    if (!entries_.allFinite()) {
      throw DataError("weight matrix has non-finite entries");
    }
    for (Index i = 0; i < entries_.rows(); ++i) {
      if (entries_(i, i) != Scalar(0)) {
        throw DataError("weight matrix diagonal entry " + std::to_string(i + 1) +
                        " is not zero");
      }
    }
  }

  Index p() const { return entries_.rows(); }
  const Matrix<Scalar>& entries() const { return entries_; }
  Normalization normalization() const { return normalization_; }

  /// Row i of W as a column vector (w_i).
  auto row(Index i) const { return entries_.row(i).transpose(); }

 private:
  Matrix<Scalar> entries_;
  Normalization normalization_ = Normalization::none;
};

namespace detail {

inline Index exact_sqrt(Index p) {
  if (p < 1) return -1;
  auto root = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(p))));
  return root * root == p ? root : -1;
}

template <typename Scalar>
void normalize_rows(Matrix<Scalar>& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    const Scalar sum = m.row(i).sum();
    if (sum != Scalar(0)) m.row(i) /= sum;
  }
}

template <typename Scalar>
void normalize_columns(Matrix<Scalar>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const Scalar sum = m.col(j).sum();
    if (sum != Scalar(0)) m.col(j) /= sum;
  }
}

/// Symmetric band 1 <= |i-j| <= width of ones, then row-normalized.
template <typename Scalar>
Matrix<Scalar> banded_block(Index size, Index width) {
  Matrix<Scalar> block = Matrix<Scalar>::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = 0; j < size; ++j) {
      const Index gap = i > j ? i - j : j - i;
      if (gap >= 1 && gap <= width) block(i, j) = Scalar(1);
    }
  }
  normalize_rows(block);
  return block;
}

inline Index checked_block_size(Index p) {
  const Index root = exact_sqrt(p);
  if (root < 0) {
    throw InvalidArgument("p = " + std::to_string(p) +
                          " is not a perfect square");
  }
  if (root <= 1) {
    throw InvalidArgument("p = " + std::to_string(p) +
                          " is too small: sqrt(p) must be at least 2");
  }
  return root;
}

}  // namespace detail

/// Block-diagonal W with sqrt(p) copies of a row-normalized sqrt(p) x sqrt(p)
/// band matrix whose neighbours are 1 <= |i-j| <= 4.
template <typename Scalar = double>
WeightMatrix<Scalar> scenario1_weights(Index p) {
  const Index m = detail::checked_block_size(p);
  const Matrix<Scalar> block = detail::banded_block<Scalar>(m, 4);
  Matrix<Scalar> w = Matrix<Scalar>::Zero(p, p);
  for (Index b = 0; b < m; ++b) w.block(b * m, b * m, m, m) = block;
  return WeightMatrix<Scalar>(std::move(w), Normalization::row);
}

/// sqrt(p) x sqrt(p) grid of blocks. The band-2 row-normalized block sits on
/// the main block diagonal and at block offsets 2, 4, 6, ... below it. Row
/// sums of the assembled matrix exceed 1 wherever offset blocks are present;
/// only the block itself is normalized.
template <typename Scalar = double>
WeightMatrix<Scalar> scenario2_weights(Index p) {
  const Index m = detail::checked_block_size(p);
  const Matrix<Scalar> block = detail::banded_block<Scalar>(m, 2);
  Matrix<Scalar> w = Matrix<Scalar>::Zero(p, p);
  for (Index b = 0; b < m; ++b) {
    for (Index c = b; c >= 0; c -= 2) w.block(b * m, c * m, m, m) = block;
  }
  return WeightMatrix<Scalar>(std::move(w), Normalization::row);
}

/// |sample correlation| off the diagonal, then each entry divided by its
/// column sum.
template <typename Derived>
WeightMatrix<typename Derived::Scalar> correlation_weights(
    const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Index p = values.rows();
  const Index n = values.cols();
  if (p < 1) throw InvalidArgument("correlation_weights: empty panel");
  if (n < 2) throw InvalidArgument("correlation_weights: need n >= 2");

  Matrix<Scalar> centered = values.colwise() - values.rowwise().mean();
  Vector<Scalar> scale = centered.rowwise().norm();
  for (Index i = 0; i < p; ++i) {
    if (!(scale(i) > Scalar(0))) {
      throw DataError("location " + std::to_string(i + 1) +
                      " has zero sample variance");
    }
    centered.row(i) /= scale(i);
  }
  Matrix<Scalar> w = (centered * centered.transpose()).cwiseAbs();
  for (Index i = 0; i < p; ++i) {
    w(i, i) = Scalar(0);
    // Rounding can push |corr| a hair above 1.
    for (Index j = 0; j < p; ++j) w(i, j) = std::min(w(i, j), Scalar(1));
  }
  detail::normalize_columns(w);
  return WeightMatrix<Scalar>(std::move(w), Normalization::column);
}

/// w_ij = 1 / (1 + |i-j|) for 1 <= |i-j| <= tau, zero otherwise, then
/// column-normalized.
template <typename Scalar = double>
WeightMatrix<Scalar> inverse_distance_weights(Index p, double tau) {
  if (p < 2) throw InvalidArgument("inverse_distance_weights: need p >= 2");
  if (!(tau > 0.0)) throw InvalidArgument("inverse_distance_weights: tau must be > 0");
  Matrix<Scalar> w = Matrix<Scalar>::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      const Index gap = i > j ? i - j : j - i;
      if (gap >= 1 && static_cast<double>(gap) <= tau) {
        w(i, j) = Scalar(1) / Scalar(1 + gap);
      }
    }
  }
  detail::normalize_columns(w);
  return WeightMatrix<Scalar>(std::move(w), Normalization::column);
}

}  // namespace gyw

#endif  // GYW_WEIGHTS_HPP
