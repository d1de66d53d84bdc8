#ifndef GYW_CLI_HPP
#define GYW_CLI_HPP

// Configuration documents
//
// Every subcommand reads one JSON object. Unknown keys are errors. Relative
// paths resolve against the working directory. Keys by command:
//
//   simulate          output_dir, seed, n, weights, coefficients?,
//                     coefficient_range?, noise_range?, noise_sd?,
//                     stability_guard?, max_redraws?, burn_in?
//   estimate          output_dir, series, weights, estimator?, truth?,
//                     standard_errors?, hac_lag?
//   test-homogeneity  output_dir, seed, series, weights, replications?,
//                     workers?, condition_limit?
//   forecast          output_dir, series, weights, estimator?, holdout?,
//                     horizon?
//   experiment        output_dir, seed, scenario, p_grid, n_grid,
//                     weights?, replications?, replicate_begin?,
//                     replicate_end?, estimators?, coefficient_range?,
//                     noise_range?, stability_guard?, max_redraws?,
//                     burn_in?, workers?
//
// weights:   {"source": "scenario1" | "scenario2", "p"?}
//            {"source": "file", "path"}
//            {"source": "inverse_distance", "p"?, "tau"}
//            {"source": "correlation"}          (needs a series)
// estimator: {"method": "gyw" | "restricted" | "restricted_ridge", "d"?,
//             "ridge_c"?, "ridge_grid"?, "ridge_folds"?, "condition_limit"?}
//
// Each run writes config.json (the input document, verbatim) and run.json
// (resolved settings and summary) to output_dir; rerunning with
// config.json reproduces every output byte for byte.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gyw/common.hpp"

namespace gyw::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericalError = 4,
  kPartial = 5,
};

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

int cmd_simulate(const nlohmann::json& config, std::ostream& out);
int cmd_estimate(const nlohmann::json& config, std::ostream& out);
int cmd_test_homogeneity(const nlohmann::json& config, std::ostream& out);
int cmd_forecast(const nlohmann::json& config, std::ostream& out);
int cmd_experiment(const nlohmann::json& config, std::ostream& out);

/// Runs `command` and maps exceptions to exit codes, writing the message to err.
int dispatch(const std::string& command, const nlohmann::json& config, std::ostream& out,
             std::ostream& err);

/// Full command line: `gyw <command> --config FILE`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gyw::cli

#endif  // GYW_CLI_HPP
