#include "gyw/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gyw::io {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

double field_value(std::string_view field, std::size_t line, std::size_t column) {
  double v = 0.0;
  if (!parse_double(trim(field), v)) {
    throw DataError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                    ": cannot parse '" + std::string(trim(field)) + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw DataError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                    ": non-finite value");
  }
  return v;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double number_from(const nlohmann::json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

PanelSeries<double> read_panel_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    for (auto f : split_fields(line)) names.emplace_back(trim(f));
    break;
  }
  if (names.empty()) throw DataError("panel CSV has no header row");
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j].empty()) throw DataError("panel CSV header: empty name in column " + std::to_string(j + 1));
  }
  const std::size_t p = names.size();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != p) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(p) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row(p);
    for (std::size_t j = 0; j < p; ++j) row[j] = field_value(fields[j], line_no, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("panel CSV has no observations");
  Eigen::MatrixXd values(static_cast<Index>(p), static_cast<Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < p; ++i) values(static_cast<Index>(i), static_cast<Index>(t)) = rows[t][i];
  }
  return PanelSeries<double>(std::move(values), std::move(names));
}

PanelSeries<double> read_panel_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_panel_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_panel_csv(std::ostream& out, const PanelSeries<double>& series) {
  for (std::size_t i = 0; i < series.names.size(); ++i) {
    out << (i ? "," : "") << series.names[i];
  }
  out << '\n';
  for (Index t = 0; t < series.n(); ++t) {
    for (Index i = 0; i < series.p(); ++i) out << (i ? "," : "") << format_double(series.values(i, t));
    out << '\n';
  }
}

void write_panel_csv(const std::filesystem::path& path, const PanelSeries<double>& series) {
  auto out = open_out(path);
  write_panel_csv(out, series);
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(rows.front().size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) row[j] = field_value(fields[j], line_no, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("matrix CSV is empty");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  write_matrix_csv(out, m);
}

std::filesystem::path weights_meta_path(const std::filesystem::path& csv_path) {
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  return meta;
}

WeightMatrix<double> read_weights(const std::filesystem::path& csv_path) {
  auto in = open_in(csv_path);
  Eigen::MatrixXd m;
  try {
    m = read_matrix_csv(in);
  } catch (const DataError& e) {
    throw DataError(csv_path.string() + ": " + e.what());
  }
  if (m.rows() != m.cols()) {
    throw DataError(csv_path.string() + ": weight matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected square");
  }
  Normalization normalization = Normalization::none;
  const auto meta_path = weights_meta_path(csv_path);
  if (std::filesystem::exists(meta_path)) {
    const nlohmann::json meta = read_json(meta_path);
    if (meta.contains("p") && meta.at("p").get<Index>() != m.rows()) {
      throw DataError(meta_path.string() + ": p does not match the matrix");
    }
    if (meta.contains("normalization")) {
      try {
        normalization = parse_normalization(meta.at("normalization").get<std::string>());
      } catch (const InvalidArgument& e) {
        throw DataError(meta_path.string() + ": " + e.what());
      }
    }
  }
  return WeightMatrix<double>(std::move(m), normalization);
}

void write_weights(const std::filesystem::path& csv_path, const WeightMatrix<double>& weights) {
  write_matrix_csv(csv_path, weights.entries());
  write_json(weights_meta_path(csv_path),
             {{"p", weights.p()}, {"normalization", std::string(to_string(weights.normalization()))}});
}

CoefficientTable read_coefficients_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    for (auto f : split_fields(line)) header.emplace_back(trim(f));
    break;
  }
  const bool with_noise = header.size() == 5 && header[4] == "noise_sd";
  if (header.size() < 4 || header[0] != "location" || header[1] != "lambda0" ||
      header[2] != "lambda1" || header[3] != "lambda2" || (header.size() > 4 && !with_noise)) {
    throw DataError("coefficient CSV header must be location,lambda0,lambda1,lambda2[,noise_sd]");
  }
  std::vector<std::string> names;
  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    names.emplace_back(trim(fields[0]));
    std::array<double, 4> row{0, 0, 0, 0};
    for (std::size_t j = 1; j < fields.size(); ++j) row[j - 1] = field_value(fields[j], line_no, j + 1);
    rows.push_back(row);
  }
  if (rows.empty()) throw DataError("coefficient CSV has no rows");
  const auto p = static_cast<Index>(rows.size());
  CoefficientTable table;
  table.names = std::move(names);
  table.coeffs = CoefficientSet<double>::zeros(p);
  if (with_noise) table.noise_sd = Eigen::VectorXd(p);
  for (Index i = 0; i < p; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    table.coeffs.set(i, Eigen::Vector3d(row[0], row[1], row[2]));
    if (with_noise) (*table.noise_sd)(i) = row[3];
  }
  return table;
}

CoefficientTable read_coefficients_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_coefficients_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_coefficients_csv(std::ostream& out, const CoefficientTable& table) {
  out << "location,lambda0,lambda1,lambda2" << (table.noise_sd ? ",noise_sd" : "") << '\n';
  for (Index i = 0; i < table.coeffs.p(); ++i) {
    const std::string name = static_cast<std::size_t>(i) < table.names.size()
                                 ? table.names[static_cast<std::size_t>(i)]
                                 : "loc" + std::to_string(i + 1);
    out << name;
    for (int k = 0; k < 3; ++k) out << ',' << format_double(table.coeffs[k](i));
    if (table.noise_sd) out << ',' << format_double((*table.noise_sd)(i));
    out << '\n';
  }
}

void write_coefficients_csv(const std::filesystem::path& path, const CoefficientTable& table) {
  auto out = open_out(path);
  write_coefficients_csv(out, table);
}

nlohmann::json to_json(const EstimationReport<double>& report, const std::vector<std::string>& names) {
  nlohmann::json doc;
  doc["format"] = "gyw-estimation-report";
  doc["version"] = 1;
  doc["method"] = std::string(to_string(report.method));
  doc["p"] = report.p();
  doc["n"] = report.n;
  doc["ridge_c"] = report.ridge_c;
  doc["ridge_penalty"] = report.ridge_penalty;
  if (!report.cv_grid.empty()) {
    nlohmann::json errors = nlohmann::json::array();
    for (double e : report.cv_errors) errors.push_back(number_or_null(e));
    doc["cv"] = {{"grid", report.cv_grid}, {"errors", errors}};
  }
  for (int k = 0; k < 3; ++k) {
    nlohmann::json values = nlohmann::json::array();
    for (Index i = 0; i < report.p(); ++i) values.push_back(number_or_null(report.coeffs[k](i)));
    doc["lambda" + std::to_string(k)] = values;
  }
  nlohmann::json locations = nlohmann::json::array();
  for (std::size_t i = 0; i < report.locations.size(); ++i) {
    const auto& diag = report.locations[i];
    nlohmann::json loc;
    loc["name"] = i < names.size() ? names[i] : "loc" + std::to_string(i + 1);
    loc["d"] = diag.d();
    std::vector<Index> selected;
    for (Index k : diag.selected) selected.push_back(k + 1);
    loc["selected"] = selected;
    loc["condition_number"] = number_or_null(diag.condition_number);
    loc["residual_norm"] = number_or_null(diag.residual_norm);
    loc["error"] = diag.error;
    if (diag.covariance) {
      nlohmann::json se = nlohmann::json::array();
      for (int k = 0; k < 3; ++k) se.push_back(number_or_null(std::sqrt((*diag.covariance)(k, k))));
      loc["standard_errors"] = se;
    }
    locations.push_back(loc);
  }
  doc["locations"] = locations;
  return doc;
}

EstimationReport<double> estimation_report_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "gyw-estimation-report") throw DataError("not an estimation report");
  EstimationReport<double> report;
  report.method = parse_method(doc.at("method").get<std::string>());
  const auto p = doc.at("p").get<Index>();
  report.n = doc.at("n").get<Index>();
  report.ridge_c = doc.at("ridge_c").get<double>();
  report.ridge_penalty = doc.at("ridge_penalty").get<double>();
  if (doc.contains("cv")) {
    report.cv_grid = doc.at("cv").at("grid").get<std::vector<double>>();
    for (const auto& e : doc.at("cv").at("errors")) report.cv_errors.push_back(number_from(e));
  }
  report.coeffs = CoefficientSet<double>::zeros(p);
  for (int k = 0; k < 3; ++k) {
    const auto& values = doc.at("lambda" + std::to_string(k));
    if (static_cast<Index>(values.size()) != p) throw DataError("report coefficient length differs from p");
    for (Index i = 0; i < p; ++i) report.coeffs[k](i) = number_from(values[static_cast<std::size_t>(i)]);
  }
  for (const auto& loc : doc.at("locations")) {
    LocationDiagnostics diag;
    for (Index k : loc.at("selected").get<std::vector<Index>>()) diag.selected.push_back(k - 1);
    diag.condition_number = number_from(loc.at("condition_number"));
    diag.residual_norm = number_from(loc.at("residual_norm"));
    diag.error = loc.at("error").get<std::string>();
    report.locations.push_back(std::move(diag));
  }
  if (static_cast<Index>(report.locations.size()) != p) throw DataError("report location count differs from p");
  return report;
}

nlohmann::json to_json(const HomogeneityTestReport& report) {
  return {{"format", "gyw-homogeneity-test"},
          {"version", 1},
          {"u_observed", report.u_observed},
          {"p_value", report.p_value},
          {"replications", report.replications},
          {"exceedances", report.exceedances},
          {"seed", report.seed},
          {"pooled", {report.pooled_coeffs(0), report.pooled_coeffs(1), report.pooled_coeffs(2)}},
          {"u_bootstrap", report.u_bootstrap}};
}

HomogeneityTestReport homogeneity_report_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "gyw-homogeneity-test") throw DataError("not a homogeneity test report");
  HomogeneityTestReport report;
  report.u_observed = doc.at("u_observed").get<double>();
  report.p_value = doc.at("p_value").get<double>();
  report.replications = doc.at("replications").get<Index>();
  report.exceedances = doc.at("exceedances").get<Index>();
  report.seed = doc.at("seed").get<std::uint64_t>();
  const auto pooled = doc.at("pooled").get<std::vector<double>>();
  if (pooled.size() != 3) throw DataError("pooled coefficients must have 3 entries");
  report.pooled_coeffs = Eigen::Vector3d(pooled[0], pooled[1], pooled[2]);
  report.u_bootstrap = doc.at("u_bootstrap").get<std::vector<double>>();
  return report;
}

void write_experiment_records(std::ostream& out, const ExperimentResult& result) {
  out << "scenario,estimator,p,n,replicate,mae\n";
  for (const auto& r : result.records) {
    out << to_string(r.scenario) << ',' << to_string(r.estimator) << ',' << r.p << ',' << r.n << ','
        << r.replicate << ',' << format_double(r.mae) << '\n';
  }
}

void write_experiment_summary(std::ostream& out, const ExperimentResult& result) {
  out << "scenario,estimator,p,n,count,mean,min,q25,median,q75,max,redraws\n";
  for (const auto& s : result.summaries) {
    out << to_string(s.scenario) << ',' << to_string(s.estimator) << ',' << s.p << ',' << s.n << ','
        << s.count << ',' << format_double(s.mean) << ',' << format_double(s.min) << ','
        << format_double(s.q25) << ',' << format_double(s.median) << ',' << format_double(s.q75)
        << ',' << format_double(s.max) << ',' << s.redraws << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace gyw::io
