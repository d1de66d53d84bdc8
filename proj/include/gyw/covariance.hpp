#ifndef GYW_COVARIANCE_HPP
#define GYW_COVARIANCE_HPP

#include "gyw/common.hpp"
#include "gyw/model.hpp"

namespace gyw {

/// Lag-0 and lag-1 sample autocovariances.
///
///   sigma0_hat    = (1/n)     sum_{t=1..n} y_t y_t^T
///   sigma1_hat    = (1/(n-1)) sum_{t=2..n} y_t y_{t-1}^T
///   sigma0_lagged = (1/(n-1)) sum_{t=2..n} y_{t-1} y_{t-1}^T
///
/// sigma0_lagged averages over the same window as sigma1_hat, so the sample
/// Yule-Walker rows (e_i - l0 w_i)^T S1 = (l1 e_i + l2 w_i)^T S0 hold exactly
/// for noise-free data. The estimators use (sigma1_hat, sigma0_lagged).
template <typename Scalar = double>
struct CovariancePair {
  Matrix<Scalar> sigma0_hat;
  Matrix<Scalar> sigma1_hat;
  Matrix<Scalar> sigma0_lagged;
  Index n_used = 0;

  Index p() const { return sigma0_hat.rows(); }

  /// Pair built from population moments, where both lag-0 windows coincide.
  static CovariancePair population(const PopulationCovariances<Scalar>& pop, Index n = 0) {
    return {pop.sigma0, pop.sigma1, pop.sigma0, n};
  }
};

namespace detail {

template <typename Scalar>
void symmetrize(Matrix<Scalar>& m) {
  m = (m + m.transpose()).eval() * Scalar(0.5);
}

}  // namespace detail

template <typename Derived>
CovariancePair<typename Derived::Scalar> sample_autocov(const Eigen::MatrixBase<Derived>& values,
                                                        bool center = false) {
  using Scalar = typename Derived::Scalar;
  const Index n = values.cols();
  if (n < 3) throw InvalidArgument("sample_autocov: need n >= 3, got " + std::to_string(n));
  Matrix<Scalar> y = values;
  if (center) y.colwise() -= y.rowwise().mean();

  CovariancePair<Scalar> out;
  out.n_used = n;
  const auto current = y.rightCols(n - 1);
  const auto lagged = y.leftCols(n - 1);
  out.sigma0_hat.noalias() = y * y.transpose();
  out.sigma0_hat /= Scalar(n);
  out.sigma1_hat.noalias() = current * lagged.transpose();
  out.sigma1_hat /= Scalar(n - 1);
  out.sigma0_lagged.noalias() = lagged * lagged.transpose();
  out.sigma0_lagged /= Scalar(n - 1);
  detail::symmetrize(out.sigma0_hat);
  detail::symmetrize(out.sigma0_lagged);
  return out;
}

template <typename Scalar>
CovariancePair<Scalar> sample_autocov(const PanelSeries<Scalar>& series, bool center = false) {
  return sample_autocov(series.values, center);
}

}  // namespace gyw

#endif  // GYW_COVARIANCE_HPP
