#include "spatfda/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spatfda {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

json to_json(const CovModel& m) {
  json j;
  j["kind"] = to_string(m.kind);
  if (m.kind != CovKind::Flat) {
    j["c0"] = m.c0;
    j["rho"] = m.rho;
  }
  j["sigma2"] = m.sigma2;
  return j;
}

json to_json(const ScoreModel& m) {
  json j = to_json(m.cov);
  j["variance"] = m.variance;
  return j;
}

json to_json(const TestResult& r) {
  json j;
  j["method"] = r.method;
  j["statistic"] = r.statistic;
  j["df"] = r.df;
  j["p_value"] = r.p_value;
  if (r.mc_reps > 0) {
    j["mc_reps"] = r.mc_reps;
  } else {
    j["mc_reps"] = nullptr;
  }
  return j;
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileFormat("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw FileFormat("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

CurveTable read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormat("cannot open curves file: " + path);
  std::string line;
  do {
    if (!std::getline(in, line)) throw FileFormat("empty curves file: " + path);
  } while (!line.empty() && line[0] == '#');

  const std::vector<std::string> header = split_csv_line(line);
  int m = 0;
  bool has_loc = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "lat_deg") {
      if (i + 2 != header.size() || header[i + 1] != "lon_deg")
        throw FileFormat("curves file: lat_deg,lon_deg must be the last two columns");
      has_loc = true;
      break;
    }
    ++m;
  }
  if (m < 1) throw FileFormat("curves file has no grid columns: " + path);

  const Grid grid(m);
  std::vector<Curve> curves;
  std::vector<Location> locs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::size_t expected = static_cast<std::size_t>(m) + (has_loc ? 2 : 0);
    if (fields.size() != expected)
      throw FileFormat("curves file: wrong column count at line " + std::to_string(lineno));
    Curve c{grid, Vector(m)};
    try {
      for (int j = 0; j < m; ++j) c.values[j] = std::stod(fields[j]);
      if (has_loc)
        locs.push_back(location_from_degrees(std::stod(fields[m]), std::stod(fields[m + 1])));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw FileFormat("curves file: bad number at line " + std::to_string(lineno));
    }
    curves.push_back(std::move(c));
  }
  if (curves.empty()) throw FileFormat("curves file has no data rows: " + path);

  CurveTable table;
  table.curves = std::move(curves);
  if (has_loc) table.locations = LocationSet(std::move(locs));
  return table;
}

void write_curves_csv(const std::string& path, const std::vector<Curve>& curves,
                      const LocationSet* locations) {
  if (curves.empty()) throw LengthMismatch("write_curves_csv: no curves");
  const int m = curves.front().grid.size();
  std::ostringstream out;
  out << "# spatfda_schema=" << kSchemaVersion << "\n";
  for (int j = 0; j < m; ++j) out << (j ? "," : "") << "t_" << (j + 1);
  if (locations != nullptr) out << ",lat_deg,lon_deg";
  out << "\n";
  constexpr double kRadToDeg = 57.29577951308232;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    for (int j = 0; j < m; ++j)
      out << (j ? "," : "") << format_double(curves[k].values[j]);
    if (locations != nullptr) {
      const Location& loc = (*locations)[static_cast<int>(k)];
      out << "," << format_double(loc.lat * kRadToDeg) << ","
          << format_double(loc.lon * kRadToDeg);
    }
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

void write_curves_csv(const std::string& path, const CurveSet& data) {
  write_curves_csv(path, data.curves(), &data.locations());
}

void write_curve_csv(const std::string& path, const Curve& curve) {
  write_curves_csv(path, std::vector<Curve>{curve}, nullptr);
}

void write_fpc_values_csv(const std::string& path, const FpcSet& fpcs) {
  std::ostringstream out;
  out << "# spatfda_schema=" << kSchemaVersion << "\n";
  out << "component,eigenvalue\n";
  for (std::size_t j = 0; j < fpcs.eigenvalues.size(); ++j)
    out << (j + 1) << "," << format_double(fpcs.eigenvalues[j]) << "\n";
  atomic_write_text(path, out.str());
}

void write_fpc_components_csv(const std::string& path, const FpcSet& fpcs) {
  write_curves_csv(path, fpcs.components, nullptr);
}

void write_mean_study_csv(const std::string& path, const MeanStudyReport& report) {
  std::ostringstream out;
  out << "# spatfda_schema=" << kSchemaVersion << "\n";
  out << "method,reps_used,failures,mean_l,se_l\n";
  for (const ErrorRow& row : report.rows) {
    out << row.method << "," << row.reps_used << "," << row.failures << ","
        << format_double(row.mean_l) << "," << format_double(row.se_l) << "\n";
  }
  atomic_write_text(path, out.str());
}

std::string mean_study_json(const MeanStudyReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "mean_study";
  j["reps"] = report.reps;
  j["m1_success_fraction"] = report.m1_success_fraction;
  j["rows"] = json::array();
  for (const ErrorRow& row : report.rows) {
    j["rows"].push_back({{"method", row.method},
                         {"reps_used", row.reps_used},
                         {"failures", row.failures},
                         {"mean_l", row.mean_l},
                         {"se_l", row.se_l}});
  }
  return j.dump(2) + "\n";
}

void write_fpc_study_csv(const std::string& path, const FpcStudyReport& report) {
  std::ostringstream out;
  out << "# spatfda_schema=" << kSchemaVersion << "\n";
  out << "method,reps_used,failures,mean_l_v1,se_l_v1,mean_l_v2,se_l_v2\n";
  for (const FpcErrorRow& row : report.rows) {
    out << row.method << "," << row.reps_used << "," << row.failures << ","
        << format_double(row.mean_l_v1) << "," << format_double(row.se_l_v1) << ","
        << format_double(row.mean_l_v2) << "," << format_double(row.se_l_v2) << "\n";
  }
  atomic_write_text(path, out.str());
}

std::string fpc_study_json(const FpcStudyReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "fpc_study";
  j["reps"] = report.reps;
  j["rows"] = json::array();
  for (const FpcErrorRow& row : report.rows) {
    j["rows"].push_back({{"method", row.method},
                         {"reps_used", row.reps_used},
                         {"failures", row.failures},
                         {"mean_l_v1", row.mean_l_v1},
                         {"se_l_v1", row.se_l_v1},
                         {"mean_l_v2", row.mean_l_v2},
                         {"se_l_v2", row.se_l_v2}});
  }
  return j.dump(2) + "\n";
}

void write_size_power_csv(const std::string& path, const SizePowerReport& report) {
  std::ostringstream out;
  out << "# spatfda_schema=" << kSchemaVersion << "\n";
  out << "method,p,dep_index,rho_dep,runs_used,rejections,rate,mc_se\n";
  for (const SizePowerRow& row : report.rows) {
    out << row.method << "," << row.p << "," << row.dep_index << ","
        << format_double(row.rho_dep) << "," << row.runs_used << "," << row.rejections
        << "," << format_double(row.rate) << "," << format_double(row.mc_se) << "\n";
  }
  atomic_write_text(path, out.str());
}

std::string size_power_json(const SizePowerReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "size_power_study";
  j["runs"] = report.runs;
  j["failures"] = report.failures;
  j["rows"] = json::array();
  for (const SizePowerRow& row : report.rows) {
    j["rows"].push_back({{"method", row.method},
                         {"p", row.p},
                         {"dep_index", row.dep_index},
                         {"rho_dep", row.rho_dep},
                         {"runs_used", row.runs_used},
                         {"rejections", row.rejections},
                         {"rate", row.rate},
                         {"mc_se", row.mc_se}});
  }
  return j.dump(2) + "\n";
}

std::string scale_model_json(const ScaleModel& model) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "scale_model";
  j["a"] = model.a;
  j["b"] = model.b;
  j["c"] = model.c;
  return j.dump(2) + "\n";
}

ScaleModel scale_model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    return make_scale_model(j.at("a").get<double>(), j.at("b").get<double>(),
                            j.at("c").get<double>());
  } catch (const json::exception& e) {
    throw FileFormat(std::string("scale model JSON: ") + e.what());
  }
}

std::string pipeline_result_json(const PipelineResult& result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "correlation_test";
  j["p"] = result.p;
  j["q"] = result.q;
  j["cumulative_variance_x"] = result.cumulative_variance_x;
  j["x_score_models"] = json::array();
  for (const ScoreModel& m : result.x_models) j["x_score_models"].push_back(to_json(m));
  j["y_score_models"] = json::array();
  for (const ScoreModel& m : result.y_models) j["y_score_models"].push_back(to_json(m));
  j["tests"] = json::array();
  if (result.s) j["tests"].push_back(to_json(*result.s));
  if (result.sm) j["tests"].push_back(to_json(*result.sm));
  if (result.t) j["tests"].push_back(to_json(*result.t));
  return j.dump(2) + "\n";
}

}  // namespace spatfda
