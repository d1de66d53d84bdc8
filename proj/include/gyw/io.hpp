#ifndef GYW_IO_HPP
#define GYW_IO_HPP

// File formats
//
// Panel series CSV: a header row of p location names, then one row per time
// point, oldest first. Fields are comma separated, decimal point is '.'.
//
// Weight matrix CSV: p rows of p comma-separated numbers, no header. A sidecar
// "<stem>.meta.json" holds {"p": <int>, "normalization": "none"|"row"|"column"}.
//
// Coefficient CSV: header "location,lambda0,lambda1,lambda2" with an optional
// trailing "noise_sd" column, one row per location.
//
// Estimation report JSON:
//   {"format": "gyw-estimation-report", "version": 1, "method": ..., "p": ...,
//    "n": ..., "ridge_c": ..., "ridge_penalty": ..., "cv": {"grid": [...],
//    "errors": [...]}, "lambda0": [...], "lambda1": [...], "lambda2": [...],
//    "locations": [{"name", "d", "selected" (1-based), "condition_number",
//    "residual_norm", "error", "standard_errors" (optional, [3])}]}
// Failed locations carry null coefficients.
//
// Homogeneity report JSON:
//   {"format": "gyw-homogeneity-test", "version": 1, "u_observed", "p_value",
//    "replications", "exceedances", "seed", "pooled": [l0, l1, l2],
//    "u_bootstrap": [...]}
//
// Experiment CSVs: long format "scenario,estimator,p,n,replicate,mae" and a
// summary "scenario,estimator,p,n,count,mean,min,q25,median,q75,max,redraws".

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gyw/common.hpp"
#include "gyw/estimator.hpp"
#include "gyw/evaluation.hpp"
#include "gyw/inference.hpp"
#include "gyw/model.hpp"
#include "gyw/weights.hpp"

namespace gyw::io {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double value);
/// Strict locale-independent parse of a whole field.
bool parse_double(std::string_view text, double& out);

PanelSeries<double> read_panel_csv(std::istream& in);
PanelSeries<double> read_panel_csv(const std::filesystem::path& path);
void write_panel_csv(std::ostream& out, const PanelSeries<double>& series);
void write_panel_csv(const std::filesystem::path& path, const PanelSeries<double>& series);

/// Headerless numeric matrix.
Eigen::MatrixXd read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

std::filesystem::path weights_meta_path(const std::filesystem::path& csv_path);
/// Reads the matrix and, when present, the sidecar metadata.
WeightMatrix<double> read_weights(const std::filesystem::path& csv_path);
void write_weights(const std::filesystem::path& csv_path, const WeightMatrix<double>& weights);

struct CoefficientTable {
  std::vector<std::string> names;
  CoefficientSet<double> coeffs;
  std::optional<Eigen::VectorXd> noise_sd;
};
CoefficientTable read_coefficients_csv(std::istream& in);
CoefficientTable read_coefficients_csv(const std::filesystem::path& path);
void write_coefficients_csv(std::ostream& out, const CoefficientTable& table);
void write_coefficients_csv(const std::filesystem::path& path, const CoefficientTable& table);

nlohmann::json to_json(const EstimationReport<double>& report,
                       const std::vector<std::string>& names = {});
EstimationReport<double> estimation_report_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const HomogeneityTestReport& report);
HomogeneityTestReport homogeneity_report_from_json(const nlohmann::json& doc);

void write_experiment_records(std::ostream& out, const ExperimentResult& result);
void write_experiment_summary(std::ostream& out, const ExperimentResult& result);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace gyw::io

#endif  // GYW_IO_HPP
