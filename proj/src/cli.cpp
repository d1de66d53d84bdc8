#include "gyw/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "gyw/estimator.hpp"
#include "gyw/evaluation.hpp"
#include "gyw/inference.hpp"
#include "gyw/io.hpp"
#include "gyw/model.hpp"
#include "gyw/random.hpp"
#include "gyw/weights.hpp"

namespace gyw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDrawStream = 0x445257ULL;
constexpr std::uint64_t kSimulateStream = 0x53494dULL;

class Section {
 public:
  Section(const json& doc, std::string where, std::initializer_list<std::string_view> allowed)
      : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw ConfigError(where_ + " must be a JSON object");
    for (const auto& item : doc_.items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key); }
  const json& raw(const std::string& key) const {
    if (!has(key)) throw ConfigError(where_ + ": missing required key '" + key + "'");
    return doc_.at(key);
  }
  std::string name(const std::string& key) const { return where_ + "." + key; }

  Index integer(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(name(key) + " must be an integer");
    return v.get<Index>();
  }
  Index integer(const std::string& key, Index fallback) const { return has(key) ? integer(key) : fallback; }

  double number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(name(key) + " must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(name(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(name(key) + " must be a string");
    return v.get<std::string>();
  }

  std::uint64_t seed() const {
    if (!has("seed")) throw ConfigError(where_ + ": 'seed' is required; runs are never seeded implicitly");
    const json& v = raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(name("seed") + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::vector<Index> integers(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(name(key) + " must be a nonempty array of integers");
    std::vector<Index> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(name(key) + " must be a nonempty array of integers");
      out.push_back(e.get<Index>());
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(name(key) + " must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(name(key) + " must be a nonempty array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::pair<double, double> range(const std::string& key, std::pair<double, double> fallback) const {
    if (!has(key)) return fallback;
    const auto v = numbers(key);
    if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError(name(key) + " must be [low, high] with low <= high");
    return {v[0], v[1]};
  }

  fs::path input_path(const std::string& key) const {
    const fs::path path = text(key);
    if (!fs::is_regular_file(path)) throw ConfigError(name(key) + ": file '" + path.string() + "' not found");
    return path;
  }

 private:
  const json& doc_;
  std::string where_;
};

Index positive(Index v, const std::string& what) {
  if (v < 1) throw ConfigError(what + " must be >= 1");
  return v;
}

fs::path prepare_output(const Section& s) {
  const fs::path dir = s.text("output_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output_dir '" + dir.string() + "'");
  return dir;
}

void write_record(const fs::path& dir, const std::string& command, const json& config, json run) {
  io::write_json(dir / "config.json", config);
  run["command"] = command;
  io::write_json(dir / "run.json", run);
}

struct WeightsSource {
  std::string source;
  std::optional<Index> p;
  double tau = 1.0;
  fs::path path;

  WeightMatrix<double> build(Index data_p, const PanelSeries<double>* series) const {
    const Index size = p.value_or(data_p);
    if (p && data_p > 0 && *p != data_p) {
      throw ConfigError("weights.p = " + std::to_string(*p) + " does not match the series (p = " +
                        std::to_string(data_p) + ")");
    }
    if (source == "file") {
      WeightMatrix<double> w = io::read_weights(path);
      if (data_p > 0 && w.p() != data_p) {
        throw DataError("weight matrix is " + std::to_string(w.p()) + "x" + std::to_string(w.p()) +
                        " but the series has p = " + std::to_string(data_p));
      }
      return w;
    }
    if (source == "correlation") return correlation_weights(series->values);
    if (size < 1) throw ConfigError("weights.p is required for source '" + source + "'");
    if (source == "scenario1") return scenario1_weights<double>(size);
    if (source == "scenario2") return scenario2_weights<double>(size);
    return inverse_distance_weights<double>(size, tau);
  }
};

WeightsSource parse_weights(const json& doc, bool have_series) {
  WeightsSource out;
  {
    Section probe(doc, "weights", {"source", "p", "tau", "path"});
    out.source = probe.text("source");
  }
  if (out.source == "scenario1" || out.source == "scenario2") {
    Section s(doc, "weights", {"source", "p"});
    if (s.has("p")) out.p = s.integer("p");
  } else if (out.source == "inverse_distance") {
    Section s(doc, "weights", {"source", "p", "tau"});
    if (s.has("p")) out.p = s.integer("p");
    out.tau = s.number("tau");
  } else if (out.source == "file") {
    Section s(doc, "weights", {"source", "path"});
    out.path = s.input_path("path");
  } else if (out.source == "correlation") {
    Section s(doc, "weights", {"source"});
    if (!have_series) throw ConfigError("weights.source 'correlation' needs an input series");
  } else {
    throw ConfigError("weights.source must be one of scenario1, scenario2, file, inverse_distance, correlation");
  }
  return out;
}

EstimatorConfig parse_estimator(const json& doc, const std::string& where) {
  Section s(doc, where, {"method", "d", "ridge_c", "ridge_grid", "ridge_folds", "condition_limit"});
  EstimatorConfig cfg;
  if (s.has("method")) {
    try {
      cfg.method = parse_method(s.text("method"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(s.name("method") + ": " + e.what());
    }
  }
  if (s.has("d")) {
    if (cfg.method == Method::full) throw ConfigError(s.name("d") + " applies only to restricted methods");
    cfg.d = s.integer("d");
  }
  if (s.has("ridge_c") || s.has("ridge_grid") || s.has("ridge_folds")) {
    if (cfg.method != Method::restricted_ridge) {
      throw ConfigError(where + ": ridge settings need method 'restricted_ridge'");
    }
  }
  if (s.has("ridge_c")) cfg.ridge.c = s.number("ridge_c");
  if (s.has("ridge_grid")) cfg.ridge.grid = s.numbers("ridge_grid");
  if (s.has("ridge_folds")) cfg.ridge.folds = static_cast<int>(s.integer("ridge_folds"));
  cfg.options.condition_limit = s.number("condition_limit", kDefaultDesignConditionLimit);
  return cfg;
}

json estimator_json(const EstimatorConfig& cfg) {
  json out = {{"method", std::string(to_string(cfg.method))},
              {"condition_limit", cfg.options.condition_limit}};
  if (cfg.d) out["d"] = *cfg.d;
  if (cfg.method == Method::restricted_ridge) {
    if (cfg.ridge.c) out["ridge_c"] = *cfg.ridge.c;
    out["ridge_grid"] = cfg.ridge.grid;
    out["ridge_folds"] = cfg.ridge.folds;
  }
  return out;
}

}  // namespace

int cmd_simulate(const json& config, std::ostream& out) {
  const Section s(config, "config",
                  {"output_dir", "seed", "n", "weights", "coefficients", "coefficient_range",
                   "noise_range", "noise_sd", "stability_guard", "max_redraws", "burn_in"});
  const std::uint64_t seed = s.seed();
  const Index n = s.integer("n");
  if (n < 2) throw ConfigError("config.n must be >= 2");
  const WeightsSource source = parse_weights(s.raw("weights"), false);
  std::optional<fs::path> coef_path;
  if (s.has("coefficients")) coef_path = s.input_path("coefficients");
  ExperimentConfig law;
  std::tie(law.coefficient_low, law.coefficient_high) = s.range("coefficient_range", {-0.6, 0.6});
  std::tie(law.noise_low, law.noise_high) = s.range("noise_range", {0.5, 1.5});
  law.stability_guard = s.number("stability_guard", 0.95);
  law.max_redraws = s.integer("max_redraws", 10000);
  law.burn_in = s.integer("burn_in", 500);
  std::optional<double> noise_sd;
  if (s.has("noise_sd")) {
    noise_sd = s.number("noise_sd");
    if (!(*noise_sd >= 0.0)) throw ConfigError("config.noise_sd must be >= 0");
  }
  if (!(law.stability_guard > 0.0 && law.stability_guard < 1.0)) {
    throw ConfigError("config.stability_guard must lie in (0, 1)");
  }
  if (law.max_redraws < 0 || law.burn_in < 0) throw ConfigError("max_redraws and burn_in must be >= 0");
  if (law.noise_low < 0.0) throw ConfigError("config.noise_range must be nonnegative");
  const fs::path dir = prepare_output(s);

  const WeightMatrix<double> weights = source.build(0, nullptr);
  const Index p = weights.p();
  std::vector<std::string> names;
  Index redraws = 0;
  std::optional<ModelSpec<double>> spec;
  if (coef_path) {
    io::CoefficientTable table = io::read_coefficients_csv(*coef_path);
    if (table.coeffs.p() != p) {
      throw DataError("coefficient file has " + std::to_string(table.coeffs.p()) +
                      " locations, weights have p = " + std::to_string(p));
    }
    Eigen::VectorXd sd = noise_sd ? Eigen::VectorXd::Constant(p, *noise_sd)
                                  : table.noise_sd.value_or(Eigen::VectorXd::Ones(p));
    names = table.names;
    spec.emplace(weights, table.coeffs, std::move(sd));
  } else {
    DrawnSpec drawn = draw_stable_spec(weights, law, derive_seed(seed, {kDrawStream}));
    redraws = drawn.redraws;
    Eigen::VectorXd sd = noise_sd ? Eigen::VectorXd::Constant(p, *noise_sd) : drawn.spec.noise_sd();
    spec.emplace(weights, drawn.spec.coeffs(), std::move(sd));
  }
  SimulationOptions sim;
  sim.burn_in = law.burn_in;
  PanelSeries<double> series = simulate(*spec, n, derive_seed(seed, {kSimulateStream}), sim);
  if (!names.empty()) series.names = names;

  io::write_panel_csv(dir / "series.csv", series);
  io::write_coefficients_csv(dir / "coefficients.csv", {series.names, spec->coeffs(), spec->noise_sd()});
  io::write_weights(dir / "weights.csv", weights);
  const double radius = build_transition(*spec).spectral_radius;
  write_record(dir, "simulate", config,
               {{"seed", seed}, {"p", p}, {"n", n}, {"burn_in", law.burn_in}, {"redraws", redraws},
                {"spectral_radius", radius}, {"weights_normalization", std::string(to_string(weights.normalization()))}});
  out << "wrote " << (dir / "series.csv").string() << " (p = " << p << ", n = " << n
      << ", spectral radius " << io::format_double(radius) << ")\n";
  return kOk;
}

int cmd_estimate(const json& config, std::ostream& out) {
  const Section s(config, "config",
                  {"output_dir", "series", "weights", "estimator", "truth", "standard_errors", "hac_lag"});
  const fs::path series_path = s.input_path("series");
  const WeightsSource source = parse_weights(s.raw("weights"), true);
  const EstimatorConfig est = s.has("estimator") ? parse_estimator(s.raw("estimator"), "estimator")
                                                 : EstimatorConfig{};
  std::optional<fs::path> truth_path;
  if (s.has("truth")) truth_path = s.input_path("truth");
  const bool want_se = s.boolean("standard_errors", false);
  std::optional<Index> hac_lag;
  if (s.has("hac_lag")) hac_lag = s.integer("hac_lag");
  const fs::path dir = prepare_output(s);

  const PanelSeries<double> series = io::read_panel_csv(series_path);
  const WeightMatrix<double> weights = source.build(series.p(), &series);
  EstimationReport<double> report = estimate(series, weights, est);
  if (want_se) attach_standard_errors(series, weights, report, hac_lag);

  json doc = io::to_json(report, series.names);
  json run = {{"p", series.p()}, {"n", series.n()}, {"estimator", estimator_json(est)},
              {"failed_locations", report.failed_locations().size()}};
  if (truth_path) {
    const io::CoefficientTable truth = io::read_coefficients_csv(*truth_path);
    if (truth.coeffs.p() != series.p()) throw DataError("truth has a different number of locations");
    const MaeResult m = mae(report.coeffs, truth.coeffs);
    doc["mae"] = m.overall;
    run["mae"] = m.overall;
    out << "mae " << io::format_double(m.overall) << '\n';
  }
  io::write_json(dir / "report.json", doc);
  write_record(dir, "estimate", config, run);
  for (Index i : report.failed_locations()) {
    out << "warning: " << report.locations[static_cast<std::size_t>(i)].error << '\n';
  }
  out << "estimated " << series.p() - static_cast<Index>(report.failed_locations().size()) << " of "
      << series.p() << " locations with " << to_string(report.method) << '\n';
  return report.all_ok() ? kOk : kPartial;
}

int cmd_test_homogeneity(const json& config, std::ostream& out) {
  const Section s(config, "config",
                  {"output_dir", "seed", "series", "weights", "replications", "workers", "condition_limit"});
  const std::uint64_t seed = s.seed();
  const fs::path series_path = s.input_path("series");
  const WeightsSource source = parse_weights(s.raw("weights"), true);
  const Index replications = s.integer("replications", 1000);
  HomogeneityOptions options;
  options.workers = static_cast<int>(s.integer("workers", 0));
  options.estimate.condition_limit = s.number("condition_limit", kDefaultDesignConditionLimit);
  const fs::path dir = prepare_output(s);

  const PanelSeries<double> series = io::read_panel_csv(series_path);
  const WeightMatrix<double> weights = source.build(series.p(), &series);
  const HomogeneityTestReport report = homogeneity_test(series, weights, replications, seed, options);
  io::write_json(dir / "homogeneity.json", io::to_json(report));
  write_record(dir, "test-homogeneity", config,
               {{"seed", seed}, {"replications", replications}, {"p_value", report.p_value},
                {"u_observed", report.u_observed}});
  out << "U = " << io::format_double(report.u_observed) << ", p-value = " << io::format_double(report.p_value)
      << " (B = " << replications << ")\n";
  return kOk;
}

int cmd_forecast(const json& config, std::ostream& out) {
  const Section s(config, "config", {"output_dir", "series", "weights", "estimator", "holdout", "horizon"});
  const fs::path series_path = s.input_path("series");
  const WeightsSource source = parse_weights(s.raw("weights"), true);
  const EstimatorConfig est = s.has("estimator") ? parse_estimator(s.raw("estimator"), "estimator")
                                                 : EstimatorConfig{};
  const Index holdout = s.integer("holdout", 6);
  if (holdout < 0) throw ConfigError("config.holdout must be >= 0");
  const Index horizon = s.integer("horizon", holdout);
  positive(horizon, "config.horizon");
  if (holdout > 0 && horizon != holdout) throw ConfigError("config.horizon must equal holdout when holdout > 0");
  const fs::path dir = prepare_output(s);

  const PanelSeries<double> series = io::read_panel_csv(series_path);
  const WeightMatrix<double> weights = source.build(series.p(), &series);
  json run = {{"p", series.p()}, {"n", series.n()}, {"holdout", holdout}, {"horizon", horizon},
              {"estimator", estimator_json(est)}};
  Eigen::MatrixXd forecasts;
  if (holdout > 0) {
    const OutOfSampleReport oos = out_of_sample_eval(series, weights, holdout, est);
    forecasts = oos.forecasts;
    std::ofstream errors(dir / "forecast_errors.csv");
    if (!errors) throw DataError("cannot write forecast_errors.csv");
    errors << "location,mean_error,mean_squared_error\n";
    for (Index i = 0; i < series.p(); ++i) {
      errors << series.names[static_cast<std::size_t>(i)] << ',' << io::format_double(oos.mean_error(i)) << ','
             << io::format_double(oos.mean_squared_error(i)) << '\n';
    }
    run["mean_abs_error"] = oos.mean_error.cwiseAbs().mean();
    run["mean_squared_error"] = oos.mean_squared_error.mean();
    out << "holdout " << holdout << ": mean squared error " << io::format_double(oos.mean_squared_error.mean())
        << '\n';
  } else {
    const EstimationReport<double> fit = estimate(series, weights, est);
    if (!fit.all_ok()) {
      throw NumericalError("fit failed at location " + std::to_string(fit.failed_locations().front() + 1));
    }
    forecasts = forecast(series, weights, fit.coeffs, horizon);
    out << "forecast " << horizon << " steps past the last observation\n";
  }
  io::write_panel_csv(dir / "forecast.csv", PanelSeries<double>(forecasts, series.names));
  write_record(dir, "forecast", config, run);
  return kOk;
}

int cmd_experiment(const json& config, std::ostream& out) {
  const Section s(config, "config",
                  {"output_dir", "seed", "scenario", "weights", "p_grid", "n_grid", "replications",
                   "replicate_begin", "replicate_end", "estimators", "coefficient_range", "noise_range",
                   "stability_guard", "max_redraws", "burn_in", "workers"});
  ExperimentConfig cfg;
  cfg.seed = s.seed();
  try {
    cfg.scenario = parse_scenario(s.text("scenario"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config.scenario: ") + e.what());
  }
  std::optional<WeightsSource> source;
  if (s.has("weights")) {
    if (cfg.scenario != Scenario::custom) throw ConfigError("config.weights applies only to scenario 'custom'");
    source = parse_weights(s.raw("weights"), false);
  } else if (cfg.scenario == Scenario::custom) {
    throw ConfigError("scenario 'custom' needs config.weights");
  }
  cfg.p_grid = s.integers("p_grid");
  cfg.n_grid = s.integers("n_grid");
  cfg.replications = s.integer("replications", 100);
  cfg.replicate_begin = s.integer("replicate_begin", 0);
  cfg.replicate_end = s.integer("replicate_end", -1);
  if (s.has("estimators")) {
    const json& list = s.raw("estimators");
    if (!list.is_array() || list.empty()) throw ConfigError("config.estimators must be a nonempty array");
    cfg.estimators.clear();
    for (std::size_t k = 0; k < list.size(); ++k) {
      cfg.estimators.push_back(parse_estimator(list[k], "estimators[" + std::to_string(k) + "]"));
    }
  }
  std::tie(cfg.coefficient_low, cfg.coefficient_high) = s.range("coefficient_range", {-0.6, 0.6});
  std::tie(cfg.noise_low, cfg.noise_high) = s.range("noise_range", {0.5, 1.5});
  cfg.stability_guard = s.number("stability_guard", 0.95);
  cfg.max_redraws = s.integer("max_redraws", 10000);
  cfg.burn_in = s.integer("burn_in", 500);
  cfg.workers = static_cast<int>(s.integer("workers", 0));
  const fs::path dir = prepare_output(s);
  if (source) cfg.custom_weights = source->build(0, nullptr);
  for (Index p : cfg.p_grid) {
    if (cfg.scenario != Scenario::custom) (void)scenario_weights(cfg.scenario, p);
  }
  cfg.validate();

  const ExperimentResult result = run_experiment(cfg);
  {
    std::ofstream records(dir / "records.csv");
    if (!records) throw DataError("cannot write records.csv");
    io::write_experiment_records(records, result);
  }
  {
    std::ofstream summary(dir / "summary.csv");
    if (!summary) throw DataError("cannot write summary.csv");
    io::write_experiment_summary(summary, result);
  }
  json errors = json::array();
  for (const auto& e : result.errors) errors.push_back({{"p", e.p}, {"n", e.n}, {"message", e.message}});
  write_record(dir, "experiment", config,
               {{"seed", cfg.seed}, {"records", result.records.size()}, {"errors", errors}});
  out << "wrote " << result.records.size() << " records and " << result.summaries.size() << " cell summaries\n";
  return result.errors.empty() ? kOk : kPartial;
}

int dispatch(const std::string& command, const json& config, std::ostream& out, std::ostream& err) {
  try {
    if (command == "simulate") return cmd_simulate(config, out);
    if (command == "estimate") return cmd_estimate(config, out);
    if (command == "test-homogeneity") return cmd_test_homogeneity(config, out);
    if (command == "forecast") return cmd_forecast(config, out);
    if (command == "experiment") return cmd_experiment(config, out);
    err << "error: unknown command '" << command << "'\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Yule-Walker estimation for spatio-temporal panels", "gyw"};
  app.require_subcommand(1);
  std::string config_path;
  const std::vector<std::string> commands{"simulate", "estimate", "test-homogeneity", "forecast", "experiment"};
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  json config;
  try {
    config = io::read_json(config_path);
  } catch (const DataError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return dispatch(command, config, out, err);
}

}  // namespace gyw::cli
