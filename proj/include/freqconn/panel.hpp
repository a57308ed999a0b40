#pragma once

#include "freqconn/core.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace freqconn {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

/// Consecutive weekdays starting at `first` (used to label simulated panels).
std::vector<Date> business_days(Date first, std::size_t count);

/// Date-indexed T x n panel of real observations.
///
/// Construction validates: timestamps strictly increasing, every cell finite,
/// every column with strictly positive sample variance. A constructed panel is
/// immutable.
class TimeSeriesPanel {
public:
  TimeSeriesPanel(std::vector<Date> timestamps, std::vector<std::string> names, Matrix values);

  [[nodiscard]] const std::vector<Date>& timestamps() const noexcept { return timestamps_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] Eigen::Index rows() const noexcept { return values_.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return values_.cols(); }

  /// Column-wise product with positive factors (scale-invariance checks, unit changes).
  [[nodiscard]] TimeSeriesPanel scaled(const Vector& factors) const;

private:
  std::vector<Date> timestamps_;
  std::vector<std::string> names_;
  Matrix values_;
};

/// Intraday log returns grouped by (date, series).
struct IntradayReturnSet {
  std::map<std::pair<Date, std::string>, std::vector<double>> returns;
  std::vector<std::string> series_order; // first-appearance order
  std::string interval = "5min";

  void add(const Date& date, const std::string& series, double value);
};

/// Reads a panel CSV: header row, one date column (ISO-8601), numeric series.
/// `date_column` empty selects the first column. When `series_filter` is given
/// the output columns follow its order.
TimeSeriesPanel load_panel(const std::filesystem::path& path, const std::string& date_column = {},
                           const std::optional<std::vector<std::string>>& series_filter = std::nullopt);

/// Writes the panel in the same layout `load_panel` reads; numbers use the
/// shortest round-trip representation.
void save_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path,
                const std::string& date_header = "date");

/// Reads an intraday CSV with columns (date, time, series, return).
IntradayReturnSet load_intraday(const std::filesystem::path& path, std::string interval = "5min");

/// Daily cell = power * ln(sum of squared intraday returns). power = 1 gives log
/// realized variance, power = 0.5 log realized volatility.
TimeSeriesPanel realized_log_volatility(const IntradayReturnSet& returns, double power = 1.0);

/// Rows [start, start + length) with column metadata preserved.
TimeSeriesPanel window(const TimeSeriesPanel& panel, Eigen::Index start, Eigen::Index length);

} // namespace freqconn
