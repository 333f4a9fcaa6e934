#ifndef SPATFDA_IO_HPP
#define SPATFDA_IO_HPP

#include <optional>
#include <string>

#include "spatfda/corr_test.hpp"
#include "spatfda/latscale.hpp"
#include "spatfda/simstudy.hpp"

namespace spatfda {

/// Version tag carried by every artifact this library writes (a
/// schema_version field in JSON, a leading "# spatfda_schema=N" comment line
/// in CSV).
constexpr int kSchemaVersion = 1;

/// Curve CSV: header t_1,...,t_m with optional lat_deg,lon_deg columns, one
/// row per curve.
struct CurveTable {
  std::vector<Curve> curves;
  std::optional<LocationSet> locations;
};

CurveTable read_curves_csv(const std::string& path);
void write_curves_csv(const std::string& path, const std::vector<Curve>& curves,
                      const LocationSet* locations);
void write_curves_csv(const std::string& path, const CurveSet& data);

/// Single-curve export (one data row).
void write_curve_csv(const std::string& path, const Curve& curve);

/// FPC exports: one file of eigenvalues, one of component curves.
void write_fpc_values_csv(const std::string& path, const FpcSet& fpcs);
void write_fpc_components_csv(const std::string& path, const FpcSet& fpcs);

void write_mean_study_csv(const std::string& path, const MeanStudyReport& report);
std::string mean_study_json(const MeanStudyReport& report);

void write_fpc_study_csv(const std::string& path, const FpcStudyReport& report);
std::string fpc_study_json(const FpcStudyReport& report);

void write_size_power_csv(const std::string& path, const SizePowerReport& report);
std::string size_power_json(const SizePowerReport& report);

std::string scale_model_json(const ScaleModel& model);
ScaleModel scale_model_from_json(const std::string& text);

/// Full correlation-test artifact: the three test results plus the fitted
/// per-component score models.
std::string pipeline_result_json(const PipelineResult& result);

/// Write a file atomically (temp file in the same directory, then rename).
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace spatfda

#endif
