#pragma once

#include "freqconn/bootstrap.hpp"
#include "freqconn/panel.hpp"
#include "freqconn/report.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace freqconn {

struct RollingConfig {
  Eigen::Index window_length = 300;
  Eigen::Index step = 1;
  VarSpec var_spec{2, true};
  std::size_t horizon = 100;
  BandPartition partition;
  bool decorrelate = false;
  std::optional<BootstrapConfig> bootstrap;
  unsigned threads = 0; // 0: all hardware threads

  void validate(Eigen::Index n) const;
};

/// Measures for one window and one covariance treatment.
struct WindowMeasures {
  BandMeasures headline;
  DirectionalSummary<double> directional;              // time domain
  std::vector<DirectionalSummary<double>> band_directional;
};

/// Bootstrap summary attached to a record; vectors follow BandMeasures::flatten.
struct WindowBands {
  Vector corrected;
  Vector lower;
  Vector upper;
};

struct PathRecord {
  Date date; // window end
  Eigen::Index start = 0;
  std::optional<std::string> gap; // reason when the window failed
  double spectral_radius = 0.0;
  double condition_number = 0.0;
  bool ridge = false;
  std::size_t undefined_points = 0;
  WindowMeasures measures;
  std::optional<WindowMeasures> decorrelated;
  std::optional<WindowBands> bands;
  std::optional<WindowBands> decorrelated_bands;
};

struct ConnectednessPath {
  std::vector<std::string> names;
  RollingConfig config;
  std::vector<PathRecord> records;

  [[nodiscard]] std::size_t gaps() const;
};

/// One record per window, labelled by the window's end date. Windows whose
/// estimation fails or whose fit is nonstationary become gap records.
ConnectednessPath run_rolling(const TimeSeriesPanel& panel, const RollingConfig& cfg);

struct DifferenceSeries {
  std::vector<Date> dates;
  std::vector<std::optional<double>> total;
  std::vector<std::vector<std::optional<double>>> within;    // [band][date]
  std::vector<std::vector<std::optional<double>>> frequency; // [band][date]
};

/// a - b on the common dates. Per-band series are produced only when both
/// paths use the same number of bands.
DifferenceSeries compare_systems(const ConnectednessPath& a, const ConnectednessPath& b);

/// Long format: date,measure,band,series,value.
void write_path_csv(std::ostream& out, const ConnectednessPath& path);
nlohmann::json to_json(const ConnectednessPath& path);
void write_difference_csv(std::ostream& out, const DifferenceSeries& diff, const BandPartition& bands);

} // namespace freqconn
