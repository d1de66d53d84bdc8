#include "doctest.h"

#include <clocale>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gyw/io.hpp"

using namespace gyw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gyw_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round trip exactly") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0}) {
    double back = 1.0;
    REQUIRE(io::parse_double(io::format_double(v), back));
    CHECK(back == v);
  }
  double x = 0.0;
  CHECK_FALSE(io::parse_double("1.5x", x));
  CHECK_FALSE(io::parse_double("", x));
  CHECK(io::parse_double("+2.5", x));
  CHECK(x == 2.5);
  CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("panel CSV round trip") {
  Eigen::MatrixXd v(2, 3);
  v << 1.5, -2.25, 1e-7, 0.1, 0.2, 0.3;
  const PanelSeries<double> series(v, {"north", "south"});
  std::stringstream buf;
  io::write_panel_csv(buf, series);
  CHECK(buf.str().rfind("north,south\n1.5,0.1\n", 0) == 0);
  const auto back = io::read_panel_csv(buf);
  CHECK(back.names == series.names);
  CHECK(back.values == v);
}

TEST_CASE("panel CSV tolerates blank lines and CRLF") {
  std::istringstream in("a,b\r\n\r\n1,2\r\n3,4\r\n\n");
  const auto s = io::read_panel_csv(in);
  CHECK(s.n() == 2);
  CHECK(s.values(1, 1) == 4.0);
}

TEST_CASE("ragged rows report their line number") {
  std::istringstream in("a,b\n1,2\n3\n");
  CHECK_THROWS_WITH_AS(io::read_panel_csv(in), doctest::Contains("line 3"), DataError);
  std::istringstream bad("a,b\n1,oops\n");
  CHECK_THROWS_WITH_AS(io::read_panel_csv(bad), doctest::Contains("column 2"), DataError);
  std::istringstream empty("a,b\n");
  CHECK_THROWS_AS(io::read_panel_csv(empty), DataError);
  std::istringstream inf("a\n1\ninf\n");
  CHECK_THROWS_AS(io::read_panel_csv(inf), DataError);
}

TEST_CASE("parsing ignores the global locale") {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  std::istringstream in("a\n0.5\n");
  CHECK(io::read_panel_csv(in).values(0, 0) == 0.5);
  CHECK(io::format_double(0.5) == "0.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("weights with metadata") {
  const auto path = scratch("w.csv");
  const auto w = scenario1_weights<double>(9);
  io::write_weights(path, w);
  CHECK(fs::exists(scratch("w.meta.json")));
  const auto back = io::read_weights(path);
  CHECK(back.entries() == w.entries());
  CHECK(back.normalization() == Normalization::row);
  fs::remove(scratch("w.meta.json"));
  CHECK(io::read_weights(path).normalization() == Normalization::none);
  std::ofstream(path) << "0,1\n1,0,2\n";
  CHECK_THROWS_WITH_AS(io::read_weights(path), doctest::Contains("line 2"), DataError);
  std::ofstream(path) << "0,1,1\n1,0,1\n";
  CHECK_THROWS_WITH_AS(io::read_weights(path), doctest::Contains("square"), DataError);
}

TEST_CASE("coefficient CSV round trip") {
  io::CoefficientTable table;
  table.names = {"x", "y"};
  table.coeffs = CoefficientSet<double>::zeros(2);
  table.coeffs.set(0, Eigen::Vector3d(0.1, 0.2, 0.3));
  table.coeffs.set(1, Eigen::Vector3d(-0.1, -0.2, -0.3));
  table.noise_sd = Eigen::Vector2d(1.0, 0.5);
  std::stringstream buf;
  io::write_coefficients_csv(buf, table);
  const auto back = io::read_coefficients_csv(buf);
  CHECK(back.names == table.names);
  CHECK(back.coeffs.at(1) == table.coeffs.at(1));
  REQUIRE(back.noise_sd.has_value());
  CHECK(*back.noise_sd == *table.noise_sd);
  std::istringstream wrong("loc,a,b,c\n");
  CHECK_THROWS_AS(io::read_coefficients_csv(wrong), DataError);
}

TEST_CASE("estimation report JSON round trip") {
  const auto spec = draw_stable_spec(scenario1_weights<double>(9), ExperimentConfig{}, 1).spec;
  const auto y = simulate(spec, 200, 2);
  auto report = ridge_restricted_estimate(y, spec.weights());
  report.coeffs.lambda0(2) = std::nan("");
  report.locations[2].error = "location 3: rank-deficient design";
  const auto doc = io::to_json(report, y.names);
  CHECK(doc["lambda0"][2].is_null());
  CHECK(doc["locations"][0]["selected"][0].get<Index>() >= 1);
  const auto back = io::estimation_report_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.method == Method::restricted_ridge);
  CHECK(back.ridge_c == report.ridge_c);
  CHECK(back.cv_errors == report.cv_errors);
  CHECK(std::isnan(back.coeffs.lambda0(2)));
  CHECK(back.coeffs.lambda1 == report.coeffs.lambda1);
  CHECK(back.locations[4].selected == report.locations[4].selected);
  CHECK(back.failed_locations() == std::vector<Index>{2});
}

TEST_CASE("homogeneity report JSON round trip") {
  HomogeneityTestReport r;
  r.u_observed = 1.25;
  r.u_bootstrap = {1.0, 2.0};
  r.p_value = 0.5;
  r.replications = 2;
  r.exceedances = 1;
  r.pooled_coeffs = Eigen::Vector3d(0.1, 0.2, 0.3);
  r.seed = 18446744073709551615ULL;
  const auto back = io::homogeneity_report_from_json(nlohmann::json::parse(io::to_json(r).dump()));
  CHECK(back.seed == r.seed);
  CHECK(back.u_bootstrap == r.u_bootstrap);
  CHECK(back.pooled_coeffs == r.pooled_coeffs);
}

TEST_CASE("experiment tables") {
  ExperimentConfig cfg;
  cfg.p_grid = {9};
  cfg.n_grid = {50};
  cfg.replications = 3;
  const auto r = run_experiment(cfg);
  std::ostringstream records;
  io::write_experiment_records(records, r);
  CHECK(records.str().rfind("scenario,estimator,p,n,replicate,mae\nscenario1,gyw,9,50,0,", 0) == 0);
  std::ostringstream summary;
  io::write_experiment_summary(summary, r);
  CHECK(summary.str().find("scenario1,gyw,9,50,3,") != std::string::npos);
}

}
