#include "gyw/inference.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <limits>
#include <string>

#include "gyw/parallel.hpp"
#include "gyw/random.hpp"

namespace gyw {

PooledCoefficients pooled_estimate(const CovariancePair<double>& cov,
                                   const WeightMatrix<double>& weights,
                                   const EstimateOptions& options) {
  const YuleWalkerMoments<double> m(cov, weights);
  const Index p = m.p();
  EquationSystem<double> stacked;
  stacked.design.resize(p * p, 3);
  stacked.response.resize(p * p);
  for (Index i = 0; i < p; ++i) {
    const EquationSystem<double> sys = equation_system(m, i);
    stacked.design.middleRows(i * p, p) = sys.design;
    stacked.response.segment(i * p, p) = sys.response;
  }
  PooledCoefficients out;
  try {
    const LocationSolution<double> sol = solve_system(stacked, 0.0, options.condition_limit);
    out.coefficients = sol.coefficients;
    out.condition_number = sol.condition_number;
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("pooled estimate: stacked design is rank-deficient (") +
                         e.what() + ")");
  }
  return out;
}

PooledCoefficients pooled_estimate(const PanelSeries<double>& series,
                                   const WeightMatrix<double>& weights,
                                   const EstimateOptions& options) {
  return pooled_estimate(sample_autocov(series), weights, options);
}

namespace {

double mean_l1(const Eigen::MatrixXd& residuals) {
  return residuals.cwiseAbs().sum() / static_cast<double>(residuals.cols());
}

}  // namespace

HomogeneityTestReport homogeneity_test(const PanelSeries<double>& series,
                                       const WeightMatrix<double>& weights, Index replications,
                                       std::uint64_t seed, const HomogeneityOptions& options) {
  if (replications < 100) throw InvalidArgument("homogeneity test needs at least 100 replications");
  if (weights.p() != series.p()) throw InvalidArgument("series and weights disagree in p");
  const Index p = series.p();
  const Index n = series.n();
  const Index m = n - 1;

  const CovariancePair<double> cov = sample_autocov(series);
  const PooledCoefficients pooled = pooled_estimate(cov, weights, options.estimate);
  const EstimationReport<double> unrestricted = gyw_estimate(cov, weights, options.estimate);
  if (!unrestricted.all_ok()) {
    throw NumericalError("homogeneity test: unrestricted fit failed at location " +
                         std::to_string(unrestricted.failed_locations().front() + 1));
  }
  const Eigen::MatrixXd residuals =
      fitted_values(series.values, weights, unrestricted.coeffs).residuals;

  const Eigen::MatrixXd& y = series.values;
  const Eigen::MatrixXd spatial = weights.entries() * y;
  const Eigen::MatrixXd r0 = spatial.rightCols(m);
  const Eigen::MatrixXd r1 = y.leftCols(m);
  const Eigen::MatrixXd r2 = spatial.leftCols(m);
  const Eigen::MatrixXd observed = y.rightCols(m);
  const Eigen::Vector3d& lam = pooled.coefficients;
  const Eigen::MatrixXd null_fit = lam(0) * r0 + lam(1) * r1 + lam(2) * r2;

  HomogeneityTestReport report;
  report.u_observed = mean_l1(observed - null_fit);
  report.replications = replications;
  report.pooled_coeffs = lam;
  report.seed = seed;
  report.u_bootstrap.assign(static_cast<std::size_t>(replications), 0.0);

  Eigen::MatrixXd regressors(p * m, 3);
  regressors.col(0) = r0.reshaped();
  regressors.col(1) = r1.reshaped();
  regressors.col(2) = r2.reshaped();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(regressors);
  if (qr.rank() < 3) throw NumericalError("homogeneity test: bootstrap regressors are rank-deficient");

  const int workers = options.workers > 0 ? options.workers : worker_count();
  parallel_for(
      replications,
      [&](Index b) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(b)}));
        std::uniform_int_distribution<Index> pick(0, m - 1);
        Eigen::MatrixXd boot(p, m);
        for (Index t = 0; t < m; ++t) boot.col(t) = null_fit.col(t) + residuals.col(pick(rng));
        const Eigen::Vector3d refit = qr.solve(boot.reshaped());
        const Eigen::MatrixXd resid = boot - (refit(0) * r0 + refit(1) * r1 + refit(2) * r2);
        report.u_bootstrap[static_cast<std::size_t>(b)] = mean_l1(resid);
      },
      workers);

  for (double u : report.u_bootstrap) {
    if (u > report.u_observed) ++report.exceedances;
  }
  report.p_value = static_cast<double>(report.exceedances) / static_cast<double>(replications);
  return report;
}

}  // namespace gyw
