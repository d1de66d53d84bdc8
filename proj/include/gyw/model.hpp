#ifndef GYW_MODEL_HPP
#define GYW_MODEL_HPP

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gyw/common.hpp"
#include "gyw/weights.hpp"

namespace gyw {

inline constexpr double kDefaultConditionLimit = 1e12;

/// Location-specific coefficients: pure spatial (lambda0), pure dynamic
/// (lambda1) and lagged spatial (lambda2).
template <typename Scalar = double>
struct CoefficientSet {
  Vector<Scalar> lambda0;
  Vector<Scalar> lambda1;
  Vector<Scalar> lambda2;

  static CoefficientSet zeros(Index p) {
    return {Vector<Scalar>::Zero(p), Vector<Scalar>::Zero(p),
            Vector<Scalar>::Zero(p)};
  }

  Index p() const { return lambda0.size(); }

  /// Coefficient k (0, 1, 2) as a vector over locations.
  const Vector<Scalar>& operator[](int k) const {
    return k == 0 ? lambda0 : (k == 1 ? lambda1 : lambda2);
  }
  Vector<Scalar>& operator[](int k) {
    return k == 0 ? lambda0 : (k == 1 ? lambda1 : lambda2);
  }

  Vector3<Scalar> at(Index i) const {
    return Vector3<Scalar>(lambda0(i), lambda1(i), lambda2(i));
  }
  void set(Index i, const Vector3<Scalar>& v) {
    lambda0(i) = v(0);
    lambda1(i) = v(1);
    lambda2(i) = v(2);
  }

  void validate() const {
    if (lambda1.size() != p() || lambda2.size() != p()) {
      throw InvalidArgument("coefficient vectors differ in length");
    }
    if (!lambda0.allFinite() || !lambda1.allFinite() || !lambda2.allFinite()) {
      throw DataError("coefficients contain non-finite entries");
    }
  }
};

/// p locations x n time points, oldest observation in column 0.
template <typename Scalar = double>
struct PanelSeries {
  Matrix<Scalar> values;
  std::vector<std::string> names;

  PanelSeries() = default;
  explicit PanelSeries(Matrix<Scalar> v, std::vector<std::string> location_names = {})
      : values(std::move(v)), names(std::move(location_names)) {
    if (!values.allFinite()) throw DataError("panel series has non-finite entries");
    if (names.empty()) {
      names.reserve(static_cast<std::size_t>(values.rows()));
      for (Index i = 0; i < values.rows(); ++i) names.push_back("loc" + std::to_string(i + 1));
    }
    if (static_cast<Index>(names.size()) != values.rows()) {
      throw InvalidArgument("location name count does not match p");
    }
  }

  Index p() const { return values.rows(); }
  Index n() const { return values.cols(); }
};

/// S(lambda0) = I - D(lambda0) W.
template <typename Scalar>
Matrix<Scalar> spatial_filter(const WeightMatrix<Scalar>& weights,
                              const Vector<Scalar>& lambda0) {
  return Matrix<Scalar>::Identity(weights.p(), weights.p()) -
         lambda0.asDiagonal() * weights.entries();
}

/// Data-generating process: weights, coefficients and per-location noise
/// standard deviations. Zero noise is accepted so that noise-free paths can be
/// generated.
template <typename Scalar = double>
class ModelSpec {
 public:
  ModelSpec(WeightMatrix<Scalar> weights, CoefficientSet<Scalar> coeffs,
            Vector<Scalar> noise_sd,
            double condition_limit = kDefaultConditionLimit)
      : weights_(std::move(weights)),
        coeffs_(std::move(coeffs)),
        noise_sd_(std::move(noise_sd)) {
    coeffs_.validate();
    if (coeffs_.p() != weights_.p() || noise_sd_.size() != weights_.p()) {
      throw InvalidArgument("model spec dimensions disagree");
    }
    if (!noise_sd_.allFinite() || (noise_sd_.array() < Scalar(0)).any()) {
      throw InvalidArgument("noise standard deviations must be finite and >= 0");
    }
    Eigen::PartialPivLU<Matrix<Scalar>> lu(spatial_filter(weights_, coeffs_.lambda0));
    const double rcond = static_cast<double>(lu.rcond());
    s_condition_ = rcond > 0.0 ? 1.0 / rcond : INFINITY;
    if (!(s_condition_ <= condition_limit)) {
      throw NumericalError("S(lambda0) = I - D(lambda0) W is numerically singular "
                           "(condition estimate " + std::to_string(s_condition_) + ")");
    }
  }

  Index p() const { return weights_.p(); }
  const WeightMatrix<Scalar>& weights() const { return weights_; }
  const CoefficientSet<Scalar>& coeffs() const { return coeffs_; }
  const Vector<Scalar>& noise_sd() const { return noise_sd_; }
  /// 1-norm condition estimate of S(lambda0).
  double s_condition() const { return s_condition_; }

 private:
  WeightMatrix<Scalar> weights_;
  CoefficientSet<Scalar> coeffs_;
  Vector<Scalar> noise_sd_;
  double s_condition_ = 1.0;
};

/// Reduced form y_t = A y_{t-1} + S^{-1} eps_t.
template <typename Scalar = double>
struct TransitionForm {
  Matrix<Scalar> a_matrix;
  Matrix<Scalar> s_inverse;
  Scalar spectral_radius = 0;
};

template <typename Scalar>
Scalar spectral_radius(const Matrix<Scalar>& a) {
  if (a.size() == 0) return Scalar(0);
  Eigen::EigenSolver<Matrix<Scalar>> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue computation did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Scalar>
TransitionForm<Scalar> build_transition(const WeightMatrix<Scalar>& weights,
                                        const CoefficientSet<Scalar>& coeffs,
                                        double condition_limit = kDefaultConditionLimit) {
  coeffs.validate();
  if (coeffs.p() != weights.p()) throw InvalidArgument("coefficients and weights disagree in p");
  Eigen::PartialPivLU<Matrix<Scalar>> lu(spatial_filter(weights, coeffs.lambda0));
  const double rcond = static_cast<double>(lu.rcond());
  if (!(rcond > 0.0) || 1.0 / rcond > condition_limit) {
    throw NumericalError("S(lambda0) = I - D(lambda0) W is numerically singular");
  }
  TransitionForm<Scalar> tf;
  tf.s_inverse = lu.inverse();
  tf.a_matrix = tf.s_inverse * (Matrix<Scalar>(coeffs.lambda1.asDiagonal()) +
                                coeffs.lambda2.asDiagonal() * weights.entries());
  tf.spectral_radius = spectral_radius(tf.a_matrix);
  return tf;
}

template <typename Scalar>
TransitionForm<Scalar> build_transition(const ModelSpec<Scalar>& spec,
                                        double condition_limit = kDefaultConditionLimit) {
  return build_transition(spec.weights(), spec.coeffs(), condition_limit);
}

struct Stationarity {
  bool stationary = false;
  double margin = 0.0;  ///< 1 - spectral radius
};

template <typename Scalar>
Stationarity is_stationary(const TransitionForm<Scalar>& tf) {
  const double rho = static_cast<double>(tf.spectral_radius);
  return {rho < 1.0, 1.0 - rho};
}

/// Solves X = A X A^T + Q for stable A by the doubling form of the fixed-point
/// iteration X <- A X A^T + Q.
template <typename Scalar>
Matrix<Scalar> solve_discrete_lyapunov(const Matrix<Scalar>& a, const Matrix<Scalar>& q,
                                       double tolerance = 1e-12, int max_doublings = 200) {
  if (a.rows() != a.cols() || q.rows() != a.rows() || q.cols() != a.cols()) {
    throw InvalidArgument("solve_discrete_lyapunov: dimension mismatch");
  }
  Matrix<Scalar> x = q;
  Matrix<Scalar> power = a;
  for (int k = 0; k < max_doublings; ++k) {
    Matrix<Scalar> increment = power * x * power.transpose();
    x += increment;
    x = (x + x.transpose()).eval() * Scalar(0.5);
    const double inc = static_cast<double>(increment.norm());
    if (inc <= tolerance * std::max(1.0, static_cast<double>(x.norm()))) return x;
    power = (power * power).eval();
  }
  throw NumericalError("discrete Lyapunov iteration did not converge");
}

template <typename Scalar = double>
struct PopulationCovariances {
  Matrix<Scalar> sigma0;  ///< Var(y_t)
  Matrix<Scalar> sigma1;  ///< Cov(y_{t+1}, y_t) = A Sigma0
};

template <typename Scalar>
PopulationCovariances<Scalar> population_covariances(const ModelSpec<Scalar>& spec) {
  const TransitionForm<Scalar> tf = build_transition(spec);
  if (!is_stationary(tf).stationary) {
    throw NumericalError("population covariances need a stationary spec (spectral radius " +
                         std::to_string(static_cast<double>(tf.spectral_radius)) + ")");
  }
  const Vector<Scalar> variance = spec.noise_sd().array().square();
  const Matrix<Scalar> q = tf.s_inverse * variance.asDiagonal() * tf.s_inverse.transpose();
  PopulationCovariances<Scalar> out;
  out.sigma0 = solve_discrete_lyapunov<Scalar>(tf.a_matrix, q);
  out.sigma1 = tf.a_matrix * out.sigma0;
  return out;
}

struct SimulationOptions {
  Index burn_in = 500;
  bool allow_explosive = false;
};

/// Draws a path of y_t = A y_{t-1} + S^{-1} eps_t, eps_{i,t} ~ N(0, sigma_i^2),
/// from y_0 (zero unless given), keeping the n states after burn_in.
template <typename Scalar>
PanelSeries<Scalar> simulate(const ModelSpec<Scalar>& spec, Index n, std::uint64_t seed,
                             const SimulationOptions& options = {},
                             const std::optional<Vector<Scalar>>& initial_state = std::nullopt) {
  if (n < 2) throw InvalidArgument("simulate: need n >= 2");
  if (options.burn_in < 0) throw InvalidArgument("simulate: burn_in must be >= 0");
  const TransitionForm<Scalar> tf = build_transition(spec);
  if (!options.allow_explosive && !is_stationary(tf).stationary) {
    throw NumericalError("simulate: spec is not stationary (spectral radius " +
                         std::to_string(static_cast<double>(tf.spectral_radius)) + ")");
  }
  const Index p = spec.p();
  Vector<Scalar> state = Vector<Scalar>::Zero(p);
  if (initial_state) {
    if (initial_state->size() != p) throw InvalidArgument("simulate: initial state has wrong size");
    state = *initial_state;
  }
  const Matrix<Scalar> shock_map = tf.s_inverse * spec.noise_sd().asDiagonal();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> shock(p);
  Matrix<Scalar> values(p, n);
  const Index total = options.burn_in + n;
  for (Index t = 0; t < total; ++t) {
    for (Index i = 0; i < p; ++i) shock(i) = static_cast<Scalar>(normal(rng));
    state = tf.a_matrix * state + shock_map * shock;
    if (t >= options.burn_in) values.col(t - options.burn_in) = state;
  }
  return PanelSeries<Scalar>(std::move(values));
}

/// Fitted values and residuals for t = 2..n; column c corresponds to time c+1
/// (0-based) of the input.
template <typename Scalar = double>
struct FitResult {
  Matrix<Scalar> fitted;
  Matrix<Scalar> residuals;
};

/// y_hat_t = D(l0) W y_t + D(l1) y_{t-1} + D(l2) W y_{t-1}.
template <typename Derived, typename Scalar = typename Derived::Scalar>
FitResult<Scalar> fitted_values(const Eigen::MatrixBase<Derived>& values,
                                const WeightMatrix<Scalar>& weights,
                                const CoefficientSet<Scalar>& coeffs) {
  const Index p = values.rows();
  const Index n = values.cols();
  if (weights.p() != p || coeffs.p() != p) throw InvalidArgument("fitted_values: dimension mismatch");
  if (n < 2) throw InvalidArgument("fitted_values: need n >= 2");
  const Matrix<Scalar> spatial = weights.entries() * values;
  FitResult<Scalar> out;
  out.fitted = coeffs.lambda0.asDiagonal() * spatial.rightCols(n - 1);
  out.fitted.noalias() += coeffs.lambda1.asDiagonal() * values.leftCols(n - 1);
  out.fitted.noalias() += coeffs.lambda2.asDiagonal() * spatial.leftCols(n - 1);
  out.residuals = values.rightCols(n - 1) - out.fitted;
  return out;
}

/// Column k-1 holds A^k y_last for k = 1..horizon.
template <typename Scalar>
Matrix<Scalar> forecast(const Vector<Scalar>& last, const TransitionForm<Scalar>& tf,
                        Index horizon) {
  if (horizon < 1) throw InvalidArgument("forecast: horizon must be >= 1");
  if (last.size() != tf.a_matrix.rows()) throw InvalidArgument("forecast: dimension mismatch");
  Matrix<Scalar> out(last.size(), horizon);
  Vector<Scalar> state = last;
  for (Index k = 0; k < horizon; ++k) {
    state = tf.a_matrix * state;
    out.col(k) = state;
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> forecast(const PanelSeries<Scalar>& series, const WeightMatrix<Scalar>& weights,
                        const CoefficientSet<Scalar>& coeffs, Index horizon) {
  if (series.n() < 1) throw InvalidArgument("forecast: empty series");
  const Vector<Scalar> last = series.values.col(series.n() - 1);
  return forecast(last, build_transition(weights, coeffs), horizon);
}

}  // namespace gyw

#endif  // GYW_MODEL_HPP
