#ifndef GYW_ESTIMATOR_HPP
#define GYW_ESTIMATOR_HPP

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gyw/common.hpp"
#include "gyw/covariance.hpp"
#include "gyw/model.hpp"
#include "gyw/weights.hpp"

namespace gyw {

inline constexpr double kDefaultDesignConditionLimit = 1e10;

enum class Method { full, restricted, restricted_ridge };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// Yule-Walker rows for one location: response ~ design * (l0, l1, l2)^T.
/// Row k of the full system is
///   (e_k^T S1^T w_i, e_k^T S0 e_i, e_k^T S0 w_i) -> e_k^T S1^T e_i.
template <typename Scalar = double>
struct EquationSystem {
  Matrix<Scalar> design;
  Vector<Scalar> response;
  Index location = 0;
};

/// Products shared by every location's system: column i of spatial_lag1 is
/// S1^T w_i and column i of spatial_lag0 is S0 w_i.
template <typename Scalar = double>
struct YuleWalkerMoments {
  Matrix<Scalar> sigma0;
  Matrix<Scalar> sigma1;
  Matrix<Scalar> spatial_lag1;
  Matrix<Scalar> spatial_lag0;
  Index n = 0;

  YuleWalkerMoments(const CovariancePair<Scalar>& cov, const WeightMatrix<Scalar>& weights)
      : sigma0(cov.sigma0_lagged), sigma1(cov.sigma1_hat), n(cov.n_used) {
    if (cov.sigma1_hat.rows() != weights.p() || cov.sigma0_lagged.rows() != weights.p()) {
      throw InvalidArgument("covariances and weights disagree in p");
    }
    spatial_lag1.noalias() = sigma1.transpose() * weights.entries().transpose();
    spatial_lag0.noalias() = sigma0 * weights.entries().transpose();
  }

  Index p() const { return sigma0.rows(); }
};

template <typename Scalar>
EquationSystem<Scalar> equation_system(const YuleWalkerMoments<Scalar>& m, Index i) {
  EquationSystem<Scalar> sys;
  sys.location = i;
  sys.design.resize(m.p(), 3);
  sys.design.col(0) = m.spatial_lag1.col(i);
  sys.design.col(1) = m.sigma0.col(i);
  sys.design.col(2) = m.spatial_lag0.col(i);
  sys.response = m.sigma1.row(i).transpose();
  return sys;
}

template <typename Scalar>
EquationSystem<Scalar> equation_system(const YuleWalkerMoments<Scalar>& m, Index i,
                                       const std::vector<Index>& rows) {
  EquationSystem<Scalar> sys;
  sys.location = i;
  const auto d = static_cast<Index>(rows.size());
  sys.design.resize(d, 3);
  sys.response.resize(d);
  for (Index r = 0; r < d; ++r) {
    const Index k = rows[static_cast<std::size_t>(r)];
    sys.design(r, 0) = m.spatial_lag1(k, i);
    sys.design(r, 1) = m.sigma0(k, i);
    sys.design(r, 2) = m.spatial_lag0(k, i);
    sys.response(r) = m.sigma1(i, k);
  }
  return sys;
}

template <typename Scalar = double>
struct RelevanceScores {
  Vector<Scalar> scores;
  std::vector<Index> ranking;  ///< descending score, ties by ascending index
};

template <typename Scalar>
RelevanceScores<Scalar> relevance_scores(const YuleWalkerMoments<Scalar>& m, Index i) {
  RelevanceScores<Scalar> out;
  out.scores = m.spatial_lag1.col(i).cwiseAbs() + m.sigma0.col(i).cwiseAbs() +
               m.spatial_lag0.col(i).cwiseAbs();
  out.ranking.resize(static_cast<std::size_t>(m.p()));
  std::iota(out.ranking.begin(), out.ranking.end(), Index{0});
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](Index a, Index b) { return out.scores(a) > out.scores(b); });
  return out;
}

template <typename Scalar>
RelevanceScores<Scalar> relevance_scores(const CovariancePair<Scalar>& cov,
                                         const WeightMatrix<Scalar>& weights, Index i) {
  if (i < 0 || i >= weights.p()) throw InvalidArgument("relevance_scores: location out of range");
  return relevance_scores(YuleWalkerMoments<Scalar>(cov, weights), i);
}

template <typename Scalar = double>
struct LocationSolution {
  Vector3<Scalar> coefficients;
  double condition_number = 0.0;
  double residual_norm = 0.0;
};

/// Least squares through column-pivoted QR. With penalty > 0 the system is
/// augmented by sqrt(penalty) * I_3, which solves
/// (Z^T Z + penalty I)^{-1} Z^T Y. The condition number is that of the
/// (augmented) design, read off the 3x3 triangular factor.
template <typename Scalar>
LocationSolution<Scalar> solve_system(const EquationSystem<Scalar>& sys, double penalty = 0.0,
                                      double condition_limit = kDefaultDesignConditionLimit) {
  if (sys.design.cols() != 3 || sys.design.rows() != sys.response.size()) {
    throw InvalidArgument("equation system must have 3 columns and matching rows");
  }
  if (penalty < 0.0) throw InvalidArgument("ridge penalty must be >= 0");
  const Index rows = sys.design.rows();
  Matrix<Scalar> design = sys.design;
  Vector<Scalar> response = sys.response;
  if (penalty > 0.0) {
    design.conservativeResize(rows + 3, 3);
    response.conservativeResize(rows + 3);
    design.bottomRows(3) = Matrix3<Scalar>::Identity() * static_cast<Scalar>(std::sqrt(penalty));
    response.tail(3).setZero();
  }
  if (design.rows() < 3) {
    throw NumericalError("location " + std::to_string(sys.location + 1) +
                         ": fewer than 3 equations");
  }
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(design);
  const Matrix3<Scalar> r = qr.matrixR().topLeftCorner(3, 3).template triangularView<Eigen::Upper>();
  const Vector3<Scalar> singular = Eigen::JacobiSVD<Matrix3<Scalar>>(r).singularValues();
  const double smax = static_cast<double>(singular(0));
  const double smin = static_cast<double>(singular(2));
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= condition_limit)) {
    throw NumericalError("location " + std::to_string(sys.location + 1) +
                         ": rank-deficient design (condition number " + std::to_string(cond) + ")");
  }
  LocationSolution<Scalar> out;
  out.coefficients = qr.solve(response);
  out.condition_number = cond;
  out.residual_norm = static_cast<double>((sys.design * out.coefficients - sys.response).norm());
  return out;
}

struct LocationDiagnostics {
  std::vector<Index> selected;  ///< equation rows used, in selection order
  double condition_number = 0.0;
  double residual_norm = 0.0;
  std::string error;  ///< empty when the location was estimated
  std::optional<Eigen::Matrix3d> covariance;

  bool ok() const { return error.empty(); }
  Index d() const { return static_cast<Index>(selected.size()); }
};

template <typename Scalar = double>
struct EstimationReport {
  CoefficientSet<Scalar> coeffs;  ///< NaN at locations that failed
  std::vector<LocationDiagnostics> locations;
  Method method = Method::full;
  double ridge_c = 0.0;        ///< C in the penalty C * p / n
  double ridge_penalty = 0.0;  ///< C * p / n
  std::vector<double> cv_grid;
  std::vector<double> cv_errors;
  Index n = 0;

  Index p() const { return coeffs.p(); }
  bool all_ok() const {
    return std::all_of(locations.begin(), locations.end(),
                       [](const LocationDiagnostics& l) { return l.ok(); });
  }
  std::vector<Index> failed_locations() const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < locations.size(); ++i) {
      if (!locations[i].ok()) out.push_back(static_cast<Index>(i));
    }
    return out;
  }
};

struct EstimateOptions {
  double condition_limit = kDefaultDesignConditionLimit;
};

/// min(p, floor(n^(10/21))), floored at 3 so the system stays identifiable.
inline Index default_equation_count(Index p, Index n) {
  const auto root = static_cast<Index>(std::floor(std::pow(static_cast<double>(n), 10.0 / 21.0)));
  return std::min(p, std::max<Index>(3, root));
}

namespace detail {

template <typename Scalar>
EstimationReport<Scalar> empty_report(Index p, Method method, Index n) {
  EstimationReport<Scalar> report;
  report.coeffs = CoefficientSet<Scalar>::zeros(p);
  report.locations.resize(static_cast<std::size_t>(p));
  report.method = method;
  report.n = n;
  return report;
}

template <typename Scalar>
void record(EstimationReport<Scalar>& report, Index i, std::vector<Index> rows,
            const EquationSystem<Scalar>& sys, double penalty, const EstimateOptions& options) {
  LocationDiagnostics& diag = report.locations[static_cast<std::size_t>(i)];
  diag.selected = std::move(rows);
  try {
    const LocationSolution<Scalar> sol = solve_system(sys, penalty, options.condition_limit);
    report.coeffs.set(i, sol.coefficients);
    diag.condition_number = sol.condition_number;
    diag.residual_norm = sol.residual_norm;
  } catch (const NumericalError& e) {
    report.coeffs.set(i, Vector3<Scalar>::Constant(std::numeric_limits<Scalar>::quiet_NaN()));
    diag.condition_number = std::numeric_limits<double>::infinity();
    diag.error = e.what();
  }
}

inline std::vector<Index> per_location_counts(const std::vector<Index>& d, Index p) {
  if (d.size() == 1) return std::vector<Index>(static_cast<std::size_t>(p), d.front());
  if (static_cast<Index>(d.size()) != p) {
    throw InvalidArgument("equation counts must be a single value or one per location");
  }
  return d;
}

inline void check_counts(const std::vector<Index>& d, Index p) {
  for (Index di : d) {
    if (di < 3 || di > p) {
      throw InvalidArgument("equation count d = " + std::to_string(di) +
                            " outside [3, p = " + std::to_string(p) + "]");
    }
  }
}

template <typename Scalar>
EstimationReport<Scalar> restricted_from_moments(const YuleWalkerMoments<Scalar>& m,
                                                 const std::vector<Index>& counts, double penalty,
                                                 Method method, const EstimateOptions& options) {
  EstimationReport<Scalar> report = empty_report<Scalar>(m.p(), method, m.n);
  report.ridge_penalty = penalty;
  for (Index i = 0; i < m.p(); ++i) {
    RelevanceScores<Scalar> rel = relevance_scores(m, i);
    rel.ranking.resize(static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]));
    const EquationSystem<Scalar> sys = equation_system(m, i, rel.ranking);
    record(report, i, std::move(rel.ranking), sys, penalty, options);
  }
  return report;
}

}  // namespace detail

/// Full generalized Yule-Walker estimator: every location uses all p rows.
template <typename Scalar>
EstimationReport<Scalar> gyw_estimate(const CovariancePair<Scalar>& cov,
                                      const WeightMatrix<Scalar>& weights,
                                      const EstimateOptions& options = {}) {
  const YuleWalkerMoments<Scalar> m(cov, weights);
  EstimationReport<Scalar> report = detail::empty_report<Scalar>(m.p(), Method::full, m.n);
  std::vector<Index> all(static_cast<std::size_t>(m.p()));
  std::iota(all.begin(), all.end(), Index{0});
  for (Index i = 0; i < m.p(); ++i) {
    detail::record(report, i, all, equation_system(m, i), 0.0, options);
  }
  return report;
}

template <typename Scalar>
EstimationReport<Scalar> gyw_estimate(const PanelSeries<Scalar>& series,
                                      const WeightMatrix<Scalar>& weights,
                                      const EstimateOptions& options = {}) {
  return gyw_estimate(sample_autocov(series), weights, options);
}

/// Keeps, per location, the d rows with the largest relevance scores.
template <typename Scalar>
EstimationReport<Scalar> restricted_estimate(const CovariancePair<Scalar>& cov,
                                             const WeightMatrix<Scalar>& weights,
                                             const std::vector<Index>& d,
                                             const EstimateOptions& options = {}) {
  const YuleWalkerMoments<Scalar> m(cov, weights);
  const std::vector<Index> counts = detail::per_location_counts(d, m.p());
  detail::check_counts(counts, m.p());
  return detail::restricted_from_moments(m, counts, 0.0, Method::restricted, options);
}

template <typename Scalar>
EstimationReport<Scalar> restricted_estimate(const PanelSeries<Scalar>& series,
                                             const WeightMatrix<Scalar>& weights,
                                             std::optional<Index> d = std::nullopt,
                                             const EstimateOptions& options = {}) {
  const Index count = d.value_or(default_equation_count(series.p(), series.n()));
  return restricted_estimate(sample_autocov(series), weights, std::vector<Index>{count}, options);
}

struct RidgeOptions {
  std::optional<double> c;  ///< fixed C; cross-validated when empty
  std::vector<double> grid{0.1, 0.5, 1.0, 5.0, 10.0, 50.0};
  int folds = 5;
};

/// Restricted estimator with penalty C * p / n on the diagonal of Z^T Z.
template <typename Scalar>
EstimationReport<Scalar> ridge_restricted_estimate(const CovariancePair<Scalar>& cov,
                                                   const WeightMatrix<Scalar>& weights,
                                                   const std::vector<Index>& d, double c,
                                                   const EstimateOptions& options = {}) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("ridge C must be finite and >= 0");
  if (cov.n_used < 1) throw InvalidArgument("ridge penalty needs the sample size");
  const YuleWalkerMoments<Scalar> m(cov, weights);
  const std::vector<Index> counts = detail::per_location_counts(d, m.p());
  detail::check_counts(counts, m.p());
  const double penalty = c * static_cast<double>(m.p()) / static_cast<double>(cov.n_used);
  EstimationReport<Scalar> report =
      detail::restricted_from_moments(m, counts, penalty, Method::restricted_ridge, options);
  report.ridge_c = c;
  return report;
}

struct RidgeSelection {
  double c = 0.0;
  std::vector<double> grid;
  std::vector<double> errors;  ///< summed held-out squared error per grid value
};

/// K contiguous time blocks; each block's lag pairs (y_{t-1}, y_t) are held
/// out, the restricted ridge fit uses the moments of the remaining pairs, and
/// the score is the held-out squared error of the one-step fitted values
/// l0 w_i^T y_t + l1 y_{i,t-1} + l2 w_i^T y_{t-1}. Ties go to the earlier grid
/// entry.
template <typename Scalar>
RidgeSelection select_ridge_c(const PanelSeries<Scalar>& series, const WeightMatrix<Scalar>& weights,
                              const std::vector<Index>& d, const RidgeOptions& ridge = {},
                              const EstimateOptions& options = {}) {
  if (ridge.grid.empty()) throw InvalidArgument("ridge cross-validation grid is empty");
  for (double c : ridge.grid) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("ridge grid values must be >= 0");
  }
  const Index p = series.p();
  const Index n = series.n();
  const Index pairs = n - 1;
  const int folds = ridge.folds;
  if (weights.p() != p) throw InvalidArgument("series and weights disagree in p");
  if (folds < 2 || pairs < 2 * folds) {
    throw InvalidArgument("ridge cross-validation needs folds >= 2 and at least 2 lag pairs per fold");
  }
  const std::vector<Index> counts = detail::per_location_counts(d, p);
  detail::check_counts(counts, p);

  const Matrix<Scalar>& y = series.values;
  const Matrix<Scalar> spatial = weights.entries() * y;
  const auto current = y.rightCols(pairs);
  const auto lagged = y.leftCols(pairs);
  const Matrix<Scalar> total1 = current * lagged.transpose();
  const Matrix<Scalar> total0 = lagged * lagged.transpose();

  RidgeSelection out;
  out.grid = ridge.grid;
  out.errors.assign(ridge.grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    const Index begin = pairs * f / folds;
    const Index end = pairs * (f + 1) / folds;
    const Index held = end - begin;
    const auto held_current = current.middleCols(begin, held);
    const auto held_lagged = lagged.middleCols(begin, held);
    const Index train = pairs - held;

    CovariancePair<Scalar> cov;
    cov.sigma1_hat = (total1 - held_current * held_lagged.transpose()) / Scalar(train);
    cov.sigma0_lagged = (total0 - held_lagged * held_lagged.transpose()) / Scalar(train);
    detail::symmetrize(cov.sigma0_lagged);
    cov.sigma0_hat = cov.sigma0_lagged;
    cov.n_used = train + 1;
    const YuleWalkerMoments<Scalar> m(cov, weights);

    for (Index i = 0; i < p; ++i) {
      RelevanceScores<Scalar> rel = relevance_scores(m, i);
      rel.ranking.resize(static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]));
      const EquationSystem<Scalar> sys = equation_system(m, i, rel.ranking);
      for (std::size_t g = 0; g < ridge.grid.size(); ++g) {
        const double penalty = ridge.grid[g] * static_cast<double>(p) / static_cast<double>(cov.n_used);
        Vector3<Scalar> coef;
        try {
          coef = solve_system(sys, penalty, options.condition_limit).coefficients;
        } catch (const NumericalError&) {
          out.errors[g] = std::numeric_limits<double>::infinity();
          continue;
        }
        double sse = 0.0;
        for (Index t = begin; t < end; ++t) {
          const Scalar pred = coef(0) * spatial(i, t + 1) + coef(1) * y(i, t) + coef(2) * spatial(i, t);
          const double e = static_cast<double>(y(i, t + 1) - pred);
          sse += e * e;
        }
        out.errors[g] += sse;
      }
    }
  }
  const auto best = std::min_element(out.errors.begin(), out.errors.end());
  out.c = ridge.grid[static_cast<std::size_t>(best - out.errors.begin())];
  return out;
}

template <typename Scalar>
EstimationReport<Scalar> ridge_restricted_estimate(const PanelSeries<Scalar>& series,
                                                   const WeightMatrix<Scalar>& weights,
                                                   std::optional<Index> d = std::nullopt,
                                                   const RidgeOptions& ridge = {},
                                                   const EstimateOptions& options = {}) {
  const std::vector<Index> counts{d.value_or(default_equation_count(series.p(), series.n()))};
  if (ridge.c) {
    return ridge_restricted_estimate(sample_autocov(series), weights, counts, *ridge.c, options);
  }
  const RidgeSelection sel = select_ridge_c(series, weights, counts, ridge, options);
  EstimationReport<Scalar> report =
      ridge_restricted_estimate(sample_autocov(series), weights, counts, sel.c, options);
  report.cv_grid = sel.grid;
  report.cv_errors = sel.errors;
  return report;
}

/// One entry point for the three estimators.
struct EstimatorConfig {
  Method method = Method::full;
  std::optional<Index> d;
  RidgeOptions ridge;
  EstimateOptions options;
};

template <typename Scalar>
EstimationReport<Scalar> estimate(const PanelSeries<Scalar>& series, const WeightMatrix<Scalar>& weights,
                                  const EstimatorConfig& config = {}) {
  switch (config.method) {
    case Method::full:
      return gyw_estimate(series, weights, config.options);
    case Method::restricted:
      return restricted_estimate(series, weights, config.d, config.options);
    case Method::restricted_ridge:
      return ridge_restricted_estimate(series, weights, config.d, config.ridge, config.options);
  }
  throw InvalidArgument("unknown estimator method");
}

template <typename Scalar = double>
struct VarianceEstimate {
  Matrix3<Scalar> covariance;  ///< V^{-1} U V^{-1} / (n - 1)
  Matrix3<Scalar> v;
  Matrix3<Scalar> u;
  Index hac_lag = 0;

  Vector3<Scalar> standard_errors() const { return covariance.diagonal().cwiseSqrt(); }
};

inline Index default_hac_lag(Index n) {
  return static_cast<Index>(std::floor(std::cbrt(static_cast<double>(n))));
}

namespace detail {

template <typename Scalar>
VarianceEstimate<Scalar> asymptotic_variance(const PanelSeries<Scalar>& series,
                                             const WeightMatrix<Scalar>& weights,
                                             const YuleWalkerMoments<Scalar>& m,
                                             const EstimationReport<Scalar>& report, Index i,
                                             Index lag) {
  const Index pairs = series.n() - 1;
  const LocationDiagnostics& diag = report.locations[static_cast<std::size_t>(i)];
  if (!diag.ok()) throw NumericalError("location " + std::to_string(i + 1) + " was not estimated");
  const EquationSystem<Scalar> sys = equation_system(m, i, diag.selected);
  const Vector3<Scalar> coef = report.coeffs.at(i);

  const auto& y = series.values;
  const Matrix<Scalar> spatial_row = weights.row(i).transpose() * y;
  Vector<Scalar> resid(pairs);
  for (Index t = 0; t < pairs; ++t) {
    resid(t) = y(i, t + 1) - coef(0) * spatial_row(0, t + 1) - coef(1) * y(i, t) -
               coef(2) * spatial_row(0, t);
  }
  // H = Z^T G with G = [z_{t-1} eps_t]_t, so U never forms the d x d Omega.
  Matrix<Scalar> projected = Matrix<Scalar>::Zero(3, pairs);
  for (std::size_t r = 0; r < diag.selected.size(); ++r) {
    const Index k = diag.selected[r];
    const Vector3<Scalar> zrow = sys.design.row(static_cast<Index>(r)).transpose();
    for (Index t = 0; t < pairs; ++t) projected.col(t) += zrow * (y(k, t) * resid(t));
  }
  Matrix3<Scalar> u = projected * projected.transpose();
  for (Index j = 1; j <= lag; ++j) {
    const Scalar weight = Scalar(1) - Scalar(j) / Scalar(lag + 1);
    const Matrix3<Scalar> gamma =
        projected.rightCols(pairs - j) * projected.leftCols(pairs - j).transpose();
    u += weight * (gamma + gamma.transpose());
  }
  u /= Scalar(pairs);
  u = (u + u.transpose()).eval() * Scalar(0.5);

  Matrix3<Scalar> v = sys.design.transpose() * sys.design;
  v.diagonal().array() += static_cast<Scalar>(report.ridge_penalty);
  v = (v + v.transpose()).eval() * Scalar(0.5);
  Eigen::FullPivLU<Matrix3<Scalar>> lu(v);
  if (!lu.isInvertible()) throw NumericalError("V is singular at location " + std::to_string(i + 1));
  const Matrix3<Scalar> v_inv = lu.inverse();

  VarianceEstimate<Scalar> out;
  out.v = v;
  out.u = u;
  out.hac_lag = lag;
  out.covariance = v_inv * u * v_inv / Scalar(pairs);
  out.covariance = (out.covariance + out.covariance.transpose()).eval() * Scalar(0.5);
  return out;
}

inline Index checked_hac_lag(std::optional<Index> hac_lag, Index n) {
  const Index lag = hac_lag.value_or(default_hac_lag(n));
  if (lag < 0 || lag >= n - 1) throw InvalidArgument("HAC lag must lie in [0, n - 1)");
  return lag;
}

}  // namespace detail

/// Sandwich covariance of location i's coefficients. V is the (ridged) Gram
/// matrix of the design rows the report used; U = Z^T Omega Z with Omega the
/// Bartlett-weighted long-run covariance of z_{t-1} * eps_hat_{i,t}, where z
/// collects the instruments y_{k,t-1} of the selected rows. Lag 0 gives the
/// uncorrected middle term.
template <typename Scalar>
VarianceEstimate<Scalar> asymptotic_variance(const PanelSeries<Scalar>& series,
                                             const WeightMatrix<Scalar>& weights,
                                             const EstimationReport<Scalar>& report, Index i,
                                             std::optional<Index> hac_lag = std::nullopt) {
  if (weights.p() != series.p() || report.p() != series.p()) {
    throw InvalidArgument("asymptotic_variance: dimension mismatch");
  }
  if (i < 0 || i >= series.p()) throw InvalidArgument("asymptotic_variance: location out of range");
  const Index lag = detail::checked_hac_lag(hac_lag, series.n());
  const YuleWalkerMoments<Scalar> m(sample_autocov(series), weights);
  return detail::asymptotic_variance(series, weights, m, report, i, lag);
}

/// Fills the diagnostics covariance of every estimated location.
template <typename Scalar>
void attach_standard_errors(const PanelSeries<Scalar>& series, const WeightMatrix<Scalar>& weights,
                            EstimationReport<Scalar>& report, std::optional<Index> hac_lag = std::nullopt) {
  if (weights.p() != series.p() || report.p() != series.p()) {
    throw InvalidArgument("attach_standard_errors: dimension mismatch");
  }
  const Index lag = detail::checked_hac_lag(hac_lag, series.n());
  const YuleWalkerMoments<Scalar> m(sample_autocov(series), weights);
  for (Index i = 0; i < report.p(); ++i) {
    auto& diag = report.locations[static_cast<std::size_t>(i)];
    if (!diag.ok()) continue;
    try {
      diag.covariance =
          detail::asymptotic_variance(series, weights, m, report, i, lag).covariance.template cast<double>();
    } catch (const NumericalError&) {
      diag.covariance.reset();
    }
  }
}

}  // namespace gyw

#endif  // GYW_ESTIMATOR_HPP
