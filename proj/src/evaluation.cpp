#include "gyw/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "gyw/parallel.hpp"
#include "gyw/random.hpp"

namespace gyw {

MaeResult mae(const CoefficientSet<double>& estimated, const CoefficientSet<double>& truth) {
  const Index p = truth.p();
  if (estimated.p() != p || estimated.lambda1.size() != p || estimated.lambda2.size() != p ||
      truth.lambda1.size() != p || truth.lambda2.size() != p) {
    throw InvalidArgument("mae: coefficient sets differ in length");
  }
  MaeResult out;
  out.per_location.resize(p);
  double sum = 0.0;
  Index used = 0;
  for (Index i = 0; i < p; ++i) {
    const double e = ((estimated.at(i) - truth.at(i)).cwiseAbs().sum()) / 3.0;
    out.per_location(i) = e;
    if (!std::isnan(e)) {
      sum += e;
      ++used;
    }
  }
  out.overall = used > 0 ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::scenario1: return "scenario1";
    case Scenario::scenario2: return "scenario2";
    case Scenario::custom: return "custom";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "scenario1") return Scenario::scenario1;
  if (text == "scenario2") return Scenario::scenario2;
  if (text == "custom") return Scenario::custom;
  throw InvalidArgument("unknown scenario '" + std::string(text) + "'");
}

WeightMatrix<double> scenario_weights(Scenario scenario, Index p) {
  switch (scenario) {
    case Scenario::scenario1: return scenario1_weights<double>(p);
    case Scenario::scenario2: return scenario2_weights<double>(p);
    case Scenario::custom: break;
  }
  throw InvalidArgument("custom scenarios carry their own weight matrix");
}

void ExperimentConfig::validate() const {
  if (p_grid.empty() || n_grid.empty()) throw InvalidArgument("experiment grids must be nonempty");
  if (replications < 1) throw InvalidArgument("experiment needs at least one replication");
  if (estimators.empty()) throw InvalidArgument("experiment needs at least one estimator");
  for (std::size_t a = 0; a < estimators.size(); ++a) {
    for (std::size_t b = a + 1; b < estimators.size(); ++b) {
      if (estimators[a].method == estimators[b].method) {
        throw InvalidArgument("experiment estimators must use distinct methods");
      }
    }
  }
  const Index end = replicate_end < 0 ? replications : replicate_end;
  if (replicate_begin < 0 || replicate_begin > end || end > replications) {
    throw InvalidArgument("replicate range must lie within [0, replications]");
  }
  if (!(coefficient_low <= coefficient_high)) throw InvalidArgument("coefficient law has low > high");
  if (!(noise_low >= 0.0 && noise_low <= noise_high)) throw InvalidArgument("noise law must satisfy 0 <= low <= high");
  if (!(stability_guard > 0.0 && stability_guard < 1.0)) throw InvalidArgument("stability guard must lie in (0, 1)");
  if (max_redraws < 0) throw InvalidArgument("max_redraws must be >= 0");
  for (Index n : n_grid) {
    if (n < 3) throw InvalidArgument("every n must be >= 3");
  }
  if (scenario == Scenario::custom) {
    if (!custom_weights) throw InvalidArgument("custom scenario needs a weight matrix");
    for (Index p : p_grid) {
      if (p != custom_weights->p()) throw InvalidArgument("custom scenario p_grid must equal the weight matrix size");
    }
  }
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DrawnSpec draw_stable_spec(const WeightMatrix<double>& weights, const ExperimentConfig& config,
                           std::uint64_t seed) {
  const Index p = weights.p();
  Rng rng(seed);
  std::uniform_real_distribution<double> coef_law(config.coefficient_low, config.coefficient_high);
  std::uniform_real_distribution<double> noise_law(config.noise_low, config.noise_high);
  for (Index attempt = 0; attempt <= config.max_redraws; ++attempt) {
    CoefficientSet<double> coeffs = CoefficientSet<double>::zeros(p);
    for (int k = 0; k < 3; ++k) {
      for (Index i = 0; i < p; ++i) coeffs[k](i) = coef_law(rng);
    }
    Eigen::VectorXd noise(p);
    for (Index i = 0; i < p; ++i) noise(i) = noise_law(rng);
    try {
      ModelSpec<double> spec(weights, std::move(coeffs), std::move(noise));
      if (build_transition(spec).spectral_radius <= config.stability_guard) {
        return {std::move(spec), attempt};
      }
    } catch (const NumericalError&) {
      // singular S(lambda0): counts as a rejected draw
    }
  }
  throw NumericalError("no coefficient draw met the stability guard within " +
                       std::to_string(config.max_redraws) + " redraws");
}

namespace {

constexpr std::uint64_t kSimulationStream = 0x53494dULL;

std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<Index, Index, int, Scenario>;
  std::map<Key, std::vector<const ExperimentRecord*>> cells;
  for (const auto& r : records) {
    cells[{r.p, r.n, static_cast<int>(r.estimator), r.scenario}].push_back(&r);
  }
  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (const auto& [key, rows] : cells) {
    CellSummary s;
    s.p = std::get<0>(key);
    s.n = std::get<1>(key);
    s.estimator = static_cast<Method>(std::get<2>(key));
    s.scenario = std::get<3>(key);
    std::vector<double> values;
    for (const auto* r : rows) {
      s.redraws += r->redraws;
      if (!std::isnan(r->mae)) values.push_back(r->mae);
    }
    s.count = static_cast<Index>(values.size());
    if (!values.empty()) {
      double total = 0.0;
      for (double v : values) total += v;
      s.mean = total / static_cast<double>(values.size());
      s.min = *std::min_element(values.begin(), values.end());
      s.max = *std::max_element(values.begin(), values.end());
      s.q25 = quantile(values, 0.25);
      s.median = quantile(values, 0.5);
      s.q75 = quantile(values, 0.75);
    } else {
      s.mean = s.min = s.max = s.q25 = s.median = s.q75 = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(s);
  }
  return out;
}

bool record_less(const ExperimentRecord& a, const ExperimentRecord& b) {
  return std::tie(a.p, a.n, a.replicate) < std::tie(b.p, b.n, b.replicate);
}

}  // namespace

const CellSummary* ExperimentResult::summary(Method estimator, Index p, Index n) const {
  for (const auto& s : summaries) {
    if (s.estimator == estimator && s.p == p && s.n == n) return &s;
  }
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Index begin = config.replicate_begin;
  const Index end = config.replicate_end < 0 ? config.replications : config.replicate_end;
  const Index per_cell = end - begin;
  const auto slots = static_cast<Index>(config.estimators.size());

  struct Cell {
    Index p;
    Index n;
    std::optional<WeightMatrix<double>> weights;
  };
  ExperimentResult result;
  std::vector<Cell> cells;
  for (Index p : config.p_grid) {
    std::optional<WeightMatrix<double>> weights;
    std::string error;
    try {
      weights = config.scenario == Scenario::custom ? *config.custom_weights
                                                    : scenario_weights(config.scenario, p);
    } catch (const InvalidArgument& e) {
      error = e.what();
    }
    for (Index n : config.n_grid) {
      if (!weights) {
        result.errors.push_back({config.scenario, p, n, error});
        continue;
      }
      cells.push_back({p, n, weights});
    }
  }

  const Index tasks = static_cast<Index>(cells.size()) * per_cell;
  std::vector<ExperimentRecord> records(static_cast<std::size_t>(tasks * slots));
  std::vector<std::string> task_errors(static_cast<std::size_t>(tasks));
  const int workers = config.workers > 0 ? config.workers : worker_count();

  parallel_for(
      tasks,
      [&](Index task) {
        const Cell& cell = cells[static_cast<std::size_t>(task / per_cell)];
        const Index replicate = begin + task % per_cell;
        const std::uint64_t cell_seed =
            derive_seed(config.seed, {static_cast<std::uint64_t>(config.scenario),
                                      static_cast<std::uint64_t>(cell.p),
                                      static_cast<std::uint64_t>(cell.n),
                                      static_cast<std::uint64_t>(replicate)});
        for (Index s = 0; s < slots; ++s) {
          ExperimentRecord& rec = records[static_cast<std::size_t>(task * slots + s)];
          rec.scenario = config.scenario;
          rec.estimator = config.estimators[static_cast<std::size_t>(s)].method;
          rec.p = cell.p;
          rec.n = cell.n;
          rec.replicate = replicate;
          rec.mae = std::numeric_limits<double>::quiet_NaN();
        }
        try {
          const DrawnSpec drawn = draw_stable_spec(*cell.weights, config, cell_seed);
          const PanelSeries<double> series =
              simulate(drawn.spec, cell.n, derive_seed(cell_seed, {kSimulationStream}),
                       SimulationOptions{config.burn_in, false});
          for (Index s = 0; s < slots; ++s) {
            ExperimentRecord& rec = records[static_cast<std::size_t>(task * slots + s)];
            rec.redraws = drawn.redraws;
            const EstimationReport<double> report =
                estimate(series, *cell.weights, config.estimators[static_cast<std::size_t>(s)]);
            rec.mae = mae(report.coeffs, drawn.spec.coeffs()).overall;
            rec.failed_locations = static_cast<Index>(report.failed_locations().size());
            rec.ridge_c = report.ridge_c;
          }
        } catch (const std::exception& e) {
          task_errors[static_cast<std::size_t>(task)] = e.what();
        }
      },
      workers);

  for (Index task = 0; task < tasks; ++task) {
    const auto& message = task_errors[static_cast<std::size_t>(task)];
    if (message.empty()) continue;
    const Cell& cell = cells[static_cast<std::size_t>(task / per_cell)];
    result.errors.push_back({config.scenario, cell.p, cell.n,
                             "replicate " + std::to_string(begin + task % per_cell) + ": " + message});
  }
  result.records = std::move(records);
  std::stable_sort(result.records.begin(), result.records.end(), record_less);
  result.summaries = summarize(result.records);
  return result;
}

ExperimentResult merge_results(const std::vector<ExperimentResult>& parts) {
  ExperimentResult out;
  for (const auto& part : parts) {
    out.records.insert(out.records.end(), part.records.begin(), part.records.end());
    out.errors.insert(out.errors.end(), part.errors.begin(), part.errors.end());
  }
  std::stable_sort(out.records.begin(), out.records.end(), record_less);
  out.summaries = summarize(out.records);
  return out;
}

OutOfSampleReport out_of_sample_eval(const PanelSeries<double>& series,
                                     const WeightMatrix<double>& weights, Index holdout,
                                     const EstimatorConfig& estimator) {
  if (holdout < 1) throw InvalidArgument("holdout must be >= 1");
  const Index train_n = series.n() - holdout;
  if (train_n < 3) throw InvalidArgument("holdout leaves fewer than 3 training observations");
  const PanelSeries<double> train(series.values.leftCols(train_n), series.names);

  OutOfSampleReport out;
  out.fit = estimate(train, weights, estimator);
  if (!out.fit.all_ok()) {
    throw NumericalError("out-of-sample fit failed at location " +
                         std::to_string(out.fit.failed_locations().front() + 1));
  }
  const Eigen::VectorXd last = train.values.col(train_n - 1);
  out.forecasts = forecast(last, build_transition(weights, out.fit.coeffs), holdout);
  out.actual = series.values.rightCols(holdout);
  const Eigen::MatrixXd error = out.forecasts - out.actual;
  out.mean_error = error.rowwise().mean();
  out.mean_squared_error = error.array().square().rowwise().mean();
  return out;
}

}  // namespace gyw
