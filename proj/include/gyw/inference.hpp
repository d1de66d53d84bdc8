#ifndef GYW_INFERENCE_HPP
#define GYW_INFERENCE_HPP

#include <cstdint>
#include <vector>

#include "gyw/common.hpp"
#include "gyw/covariance.hpp"
#include "gyw/estimator.hpp"
#include "gyw/model.hpp"
#include "gyw/weights.hpp"

namespace gyw {

/// Common (lambda0, lambda1, lambda2) for all locations.
struct PooledCoefficients {
  Eigen::Vector3d coefficients = Eigen::Vector3d::Zero();
  double condition_number = 0.0;
};

/// Stacks the p full Yule-Walker systems into one p^2 x 3 least-squares
/// problem with shared coefficients.
PooledCoefficients pooled_estimate(const CovariancePair<double>& cov,
                                   const WeightMatrix<double>& weights,
                                   const EstimateOptions& options = {});
PooledCoefficients pooled_estimate(const PanelSeries<double>& series,
                                   const WeightMatrix<double>& weights,
                                   const EstimateOptions& options = {});

struct HomogeneityTestReport {
  double u_observed = 0.0;
  std::vector<double> u_bootstrap;
  double p_value = 0.0;
  Index replications = 0;
  Index exceedances = 0;  ///< #{U* > U}
  Eigen::Vector3d pooled_coeffs = Eigen::Vector3d::Zero();
  std::uint64_t seed = 0;
};

struct HomogeneityOptions {
  int workers = 0;  ///< 0 selects worker_count()
  EstimateOptions estimate;
};

/// Residual bootstrap test of equal coefficients across locations.
///
/// U = mean_t ||y_t - y~_t||_1 with y~_t the pooled fit
/// l0 W y_t + l1 y_{t-1} + l2 W y_{t-1}. Each replicate rebuilds
/// y*_t = y~_t + eps*_t, where eps*_t is a whole cross-sectional residual
/// vector of the unrestricted fit drawn with replacement, refits the three
/// scalars by least squares on the original regressors and records U*.
/// Averages run over t = 2..n. Replicate b draws from
/// derive_seed(seed, {b}), so the result does not depend on the worker count.
HomogeneityTestReport homogeneity_test(const PanelSeries<double>& series,
                                       const WeightMatrix<double>& weights, Index replications,
                                       std::uint64_t seed, const HomogeneityOptions& options = {});

}  // namespace gyw

#endif  // GYW_INFERENCE_HPP
