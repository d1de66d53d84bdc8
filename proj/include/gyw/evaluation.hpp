#ifndef GYW_EVALUATION_HPP
#define GYW_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gyw/common.hpp"
#include "gyw/estimator.hpp"
#include "gyw/model.hpp"
#include "gyw/weights.hpp"

namespace gyw {

struct MaeResult {
  Eigen::VectorXd per_location;  ///< (1/3) sum_j |est_ji - true_ji|
  double overall = 0.0;          ///< mean over locations
};

/// Mean absolute coefficient error. Locations whose estimate is NaN (failed
/// estimation) are NaN in per_location and skipped in the overall mean; the
/// overall value is NaN only when every location failed.
MaeResult mae(const CoefficientSet<double>& estimated, const CoefficientSet<double>& truth);

enum class Scenario { scenario1, scenario2, custom };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

/// Weight matrix of a built-in scenario for dimension p.
WeightMatrix<double> scenario_weights(Scenario scenario, Index p);

struct ExperimentConfig {
  Scenario scenario = Scenario::scenario1;
  std::optional<WeightMatrix<double>> custom_weights;  ///< required for Scenario::custom
  std::vector<Index> p_grid{25};
  std::vector<Index> n_grid{500};
  Index replications = 100;
  /// Replicates [replicate_begin, replicate_end) are run; end < 0 means
  /// `replications`. Disjoint ranges merge into the full table.
  Index replicate_begin = 0;
  Index replicate_end = -1;
  std::vector<EstimatorConfig> estimators{EstimatorConfig{}};
  double coefficient_low = -0.6;
  double coefficient_high = 0.6;
  double noise_low = 0.5;
  double noise_high = 1.5;
  double stability_guard = 0.95;  ///< redraw until spectral radius <= guard
  Index max_redraws = 10000;
  Index burn_in = 500;
  std::uint64_t seed = 0;
  int workers = 0;  ///< 0 selects worker_count()

  void validate() const;
};

struct ExperimentRecord {
  Scenario scenario = Scenario::scenario1;
  Method estimator = Method::full;
  Index p = 0;
  Index n = 0;
  Index replicate = 0;
  double mae = 0.0;
  Index redraws = 0;           ///< rejected coefficient draws before this replicate's spec
  Index failed_locations = 0;  ///< locations with a rank-deficient design
  double ridge_c = 0.0;
};

struct CellSummary {
  Scenario scenario = Scenario::scenario1;
  Method estimator = Method::full;
  Index p = 0;
  Index n = 0;
  Index count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  Index redraws = 0;
};

struct CellError {
  Scenario scenario = Scenario::scenario1;
  Index p = 0;
  Index n = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;  ///< sorted by (p, n, replicate, estimator slot)
  std::vector<CellSummary> summaries;
  std::vector<CellError> errors;

  /// Summary for one cell, or nullptr.
  const CellSummary* summary(Method estimator, Index p, Index n) const;
};

/// Linear-interpolation quantile (R type 7) of an unsorted sample.
double quantile(std::vector<double> values, double prob);

/// Draws (coefficients, noise sd) until the transition is within the guard.
struct DrawnSpec {
  ModelSpec<double> spec;
  Index redraws = 0;
};
DrawnSpec draw_stable_spec(const WeightMatrix<double>& weights, const ExperimentConfig& config,
                           std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Concatenates partial results (disjoint replicate ranges) and recomputes
/// the summaries.
ExperimentResult merge_results(const std::vector<ExperimentResult>& parts);

struct OutOfSampleReport {
  Eigen::MatrixXd forecasts;  ///< p x holdout, column k-1 is the k-step forecast
  Eigen::MatrixXd actual;     ///< held-out observations
  Eigen::VectorXd mean_error;          ///< per location, mean of (forecast - actual)
  Eigen::VectorXd mean_squared_error;  ///< per location
  EstimationReport<double> fit;
};

/// Fits on the first n - holdout observations and forecasts the held-out
/// ones at horizons 1..holdout from the last training observation.
OutOfSampleReport out_of_sample_eval(const PanelSeries<double>& series,
                                     const WeightMatrix<double>& weights, Index holdout = 6,
                                     const EstimatorConfig& estimator = {});

}  // namespace gyw

#endif  // GYW_EVALUATION_HPP
