#include "doctest.h"

#include "gyw/evaluation.hpp"
#include "gyw/random.hpp"

using namespace gyw;

namespace {

EstimatorConfig method(Method m) {
  EstimatorConfig e;
  e.method = m;
  return e;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("mae arithmetic") {
  const auto truth = CoefficientSet<double>::zeros(10);
  CHECK(mae(truth, truth).overall == 0.0);
  auto est = truth;
  est.lambda1(3) = 0.3;
  const auto m = mae(est, truth);
  CHECK(m.overall == doctest::Approx(0.01));
  CHECK(m.per_location(3) == doctest::Approx(0.1));
}

TEST_CASE("mae of zero against uniform truth tends to 0.3") {
  const Index p = 10000;
  Rng rng(1);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  auto truth = CoefficientSet<double>::zeros(p);
  for (int k = 0; k < 3; ++k) {
    for (Index i = 0; i < p; ++i) truth[k](i) = u(rng);
  }
  CHECK(std::abs(mae(CoefficientSet<double>::zeros(p), truth).overall - 0.3) < 0.02);
}

TEST_CASE("mae skips failed locations") {
  auto truth = CoefficientSet<double>::zeros(2);
  auto est = truth;
  est.lambda0(0) = std::nan("");
  est.lambda0(1) = 0.3;
  const auto m = mae(est, truth);
  CHECK(std::isnan(m.per_location(0)));
  CHECK(m.overall == doctest::Approx(0.1));
}

TEST_CASE("quantile follows linear interpolation") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({7}, 0.9) == 7.0);
}

TEST_CASE("drawn specs respect the guard and the laws") {
  ExperimentConfig cfg;
  const auto w = scenario1_weights<double>(25);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto d = draw_stable_spec(w, cfg, s);
    CHECK(build_transition(d.spec).spectral_radius <= 0.95);
    for (int k = 0; k < 3; ++k) CHECK(d.spec.coeffs()[k].cwiseAbs().maxCoeff() <= 0.6);
    CHECK(d.spec.noise_sd().minCoeff() >= 0.5);
    CHECK(d.spec.noise_sd().maxCoeff() <= 1.5);
  }
  cfg.stability_guard = 1e-6;
  cfg.max_redraws = 3;
  CHECK_THROWS_AS(draw_stable_spec(w, cfg, 1), NumericalError);
}

TEST_CASE("experiment is deterministic and independent of workers") {
  ExperimentConfig cfg;
  cfg.p_grid = {9, 25};
  cfg.n_grid = {100, 200};
  cfg.replications = 4;
  cfg.estimators = {method(Method::full), method(Method::restricted)};
  cfg.seed = 5;
  cfg.workers = 1;
  const auto a = run_experiment(cfg);
  cfg.workers = 3;
  const auto b = run_experiment(cfg);
  REQUIRE(a.records.size() == 2 * 2 * 4 * 2);
  REQUIRE(b.records.size() == a.records.size());
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    CHECK(a.records[r].mae == b.records[r].mae);
    CHECK(a.records[r].p == b.records[r].p);
    CHECK(a.records[r].replicate == b.records[r].replicate);
  }
  CHECK(a.summaries.size() == 8);
}

TEST_CASE("replicate ranges merge into the full run") {
  ExperimentConfig cfg;
  cfg.p_grid = {9};
  cfg.n_grid = {100};
  cfg.replications = 6;
  cfg.seed = 9;
  const auto whole = run_experiment(cfg);
  cfg.replicate_end = 2;
  const auto first = run_experiment(cfg);
  cfg.replicate_begin = 2;
  cfg.replicate_end = 6;
  const auto second = run_experiment(cfg);
  const auto merged = merge_results({second, first});
  REQUIRE(merged.records.size() == whole.records.size());
  for (std::size_t r = 0; r < whole.records.size(); ++r) {
    CHECK(merged.records[r].mae == whole.records[r].mae);
    CHECK(merged.records[r].replicate == whole.records[r].replicate);
  }
  const auto* s = merged.summary(Method::full, 9, 100);
  REQUIRE(s != nullptr);
  CHECK(s->median == whole.summary(Method::full, 9, 100)->median);
}

TEST_CASE("median MAE does not increase with n") {
  ExperimentConfig cfg;
  cfg.p_grid = {25};
  cfg.n_grid = {100, 250, 500, 750, 1000};
  cfg.replications = 20;
  cfg.estimators = {method(Method::full), method(Method::restricted)};
  cfg.seed = 13;
  const auto r = run_experiment(cfg);
  for (Method m : {Method::full, Method::restricted}) {
    double prev = 1e9;
    for (Index n : cfg.n_grid) {
      const double med = r.summary(m, 25, n)->median;
      CHECK(med <= prev);
      prev = med;
    }
  }
}

TEST_CASE("experiment configuration is validated") {
  ExperimentConfig cfg;
  cfg.estimators = {method(Method::full), method(Method::full)};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ExperimentConfig{};
  cfg.replicate_begin = 5;
  cfg.replicate_end = 2;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ExperimentConfig{};
  cfg.scenario = Scenario::custom;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ExperimentConfig{};
  cfg.p_grid = {10};
  cfg.n_grid = {50};
  cfg.replications = 1;
  const auto bad = run_experiment(cfg);
  REQUIRE(bad.errors.size() == 1);
  CHECK(bad.errors.front().message.find("perfect square") != std::string::npos);
  for (Scenario s : {Scenario::scenario1, Scenario::scenario2, Scenario::custom}) CHECK(parse_scenario(to_string(s)) == s);
}

TEST_CASE("custom scenario uses the supplied weights") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::custom;
  cfg.custom_weights = inverse_distance_weights<double>(12, 3.0);
  cfg.p_grid = {12};
  cfg.n_grid = {150};
  cfg.replications = 2;
  cfg.seed = 3;
  const auto r = run_experiment(cfg);
  CHECK(r.errors.empty());
  CHECK(r.records.size() == 2);
}

TEST_CASE("out-of-sample evaluation") {
  const auto w = scenario1_weights<double>(9);
  const auto base = draw_stable_spec(w, ExperimentConfig{}, 21).spec;
  SUBCASE("zero noise gives zero error") {
    const ModelSpec<double> quiet(w, base.coeffs(), Eigen::VectorXd::Zero(9));
    SimulationOptions opts;
    opts.burn_in = 0;
    const auto y = simulate(quiet, Index{40}, std::uint64_t{0}, opts,
                            std::optional<Eigen::VectorXd>(Eigen::VectorXd::LinSpaced(9, -1.0, 2.0)));
    const auto oos = out_of_sample_eval(y, w);
    CHECK(oos.forecasts.cols() == 6);
    CHECK(oos.mean_error.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(oos.mean_squared_error.maxCoeff() < 1e-8);
  }
  SUBCASE("forecasts start from the last training observation") {
    const auto y = simulate(base, 200, 22);
    const auto oos = out_of_sample_eval(y, w, 4);
    const auto tf = build_transition(w, oos.fit.coeffs);
    const Eigen::VectorXd start = y.values.col(195);
    CHECK((oos.forecasts - forecast(start, tf, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(oos.actual == y.values.rightCols(4));
  }
  SUBCASE("signed errors centre on zero") {
    CoefficientSet<double> c = CoefficientSet<double>::zeros(9);
    c.lambda0.setConstant(0.2);
    c.lambda1.setConstant(0.3);
    c.lambda2.setConstant(0.1);
    const ModelSpec<double> spec(w, c, Eigen::VectorXd::Ones(9));
    Eigen::MatrixXd errors(9, 50);
    for (Index s = 0; s < 50; ++s) {
      errors.col(s) = out_of_sample_eval(simulate(spec, 300, 100 + static_cast<std::uint64_t>(s)), w).mean_error;
    }
    std::vector<double> scaled;
    for (Index i = 0; i < 9; ++i) {
      const double mean = errors.row(i).mean();
      const double sd = std::sqrt((errors.row(i).array() - mean).square().sum() / 49.0);
      scaled.push_back(std::abs(mean) / (sd / std::sqrt(50.0)));
    }
    CHECK(quantile(scaled, 0.5) < 2.0);
  }
  CHECK_THROWS_AS(out_of_sample_eval(simulate(base, 8, 1), w, 6), InvalidArgument);
}

}
