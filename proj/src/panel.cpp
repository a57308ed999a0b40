#include "freqconn/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace freqconn {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Comma-separated fields; double quotes protect commas, "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  return in;
}

} // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::size_t off, std::size_t len, auto& out) {
    auto [p, ec] = std::from_chars(text.data() + off, text.data() + off + len, out);
    return ec == std::errc{} && p == text.data() + off + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::vector<Date> business_days(Date first, std::size_t count) {
  using namespace std::chrono;
  std::vector<Date> out;
  out.reserve(count);
  sys_days d{first};
  while (out.size() < count) {
    auto wd = weekday{d};
    if (wd != Saturday && wd != Sunday) out.emplace_back(d);
    d += days{1};
  }
  return out;
}

TimeSeriesPanel::TimeSeriesPanel(std::vector<Date> timestamps, std::vector<std::string> names,
                                 Matrix values)
    : timestamps_(std::move(timestamps)), names_(std::move(names)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(timestamps_.size()) != values_.rows())
    throw ValidationError("panel: " + std::to_string(timestamps_.size()) + " timestamps for " +
                          std::to_string(values_.rows()) + " rows");
  if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
    throw ValidationError("panel: " + std::to_string(names_.size()) + " names for " +
                          std::to_string(values_.cols()) + " columns");
  if (values_.rows() < 2 || values_.cols() < 1)
    throw ValidationError("panel needs at least 2 rows and 1 column");
  for (std::size_t t = 1; t < timestamps_.size(); ++t) {
    if (!(timestamps_[t - 1] < timestamps_[t]))
      throw ValidationError("panel: timestamps not strictly increasing at row " + std::to_string(t) +
                            " (" + format_iso_date(timestamps_[t]) + ")");
  }
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index t = 0; t < values_.rows(); ++t) {
      if (!std::isfinite(values_(t, j)))
        throw ValidationError("panel: non-finite value at row " + std::to_string(t) + ", column '" +
                              names_[j] + "'");
    }
    const double mean = values_.col(j).mean();
    const double var = (values_.col(j).array() - mean).square().sum();
    if (!(var > 0.0)) throw ValidationError("panel: column '" + names_[j] + "' is constant");
  }
}

TimeSeriesPanel TimeSeriesPanel::scaled(const Vector& factors) const {
  if (factors.size() != cols() || (factors.array() <= 0.0).any())
    throw ValidationError("scaled: need one positive factor per column");
  return TimeSeriesPanel(timestamps_, names_, values_ * factors.asDiagonal());
}

void IntradayReturnSet::add(const Date& date, const std::string& series, double value) {
  if (std::find(series_order.begin(), series_order.end(), series) == series_order.end())
    series_order.push_back(series);
  returns[{date, series}].push_back(value);
}

TimeSeriesPanel load_panel(const std::filesystem::path& path, const std::string& date_column,
                           const std::optional<std::vector<std::string>>& series_filter) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw LoadError("'" + path.string() + "': missing header row");
  const auto header = split_csv_line(line);

  std::size_t date_idx = 0;
  if (!date_column.empty()) {
    auto it = std::find(header.begin(), header.end(), date_column);
    if (it == header.end()) throw LoadError("date column '" + date_column + "' not in header");
    date_idx = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::size_t> cols;
  std::vector<std::string> names;
  if (series_filter) {
    for (const auto& name : *series_filter) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end() || static_cast<std::size_t>(it - header.begin()) == date_idx)
        throw LoadError("series '" + name + "' not in header");
      cols.push_back(static_cast<std::size_t>(it - header.begin()));
      names.push_back(name);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == date_idx) continue;
      cols.push_back(c);
      names.push_back(header[c]);
    }
  }
  if (cols.empty()) throw LoadError("'" + path.string() + "': no series columns");

  std::vector<Date> dates;
  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw LoadError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    auto date = parse_iso_date(fields[date_idx]);
    if (!date)
      throw LoadError("row " + std::to_string(row) + ", column '" + header[date_idx] +
                      "': unparseable date '" + fields[date_idx] + "'");
    if (!dates.empty() && !(dates.back() < *date)) {
      if (dates.back() == *date)
        throw LoadError("row " + std::to_string(row) + ": duplicate date " + fields[date_idx]);
      throw LoadError("row " + std::to_string(row) + ": date " + fields[date_idx] +
                      " out of order");
    }
    std::vector<double> vals;
    vals.reserve(cols.size());
    for (std::size_t c : cols) {
      if (fields[c].empty())
        throw LoadError("row " + std::to_string(row) + ", column '" + header[c] + "': empty cell");
      auto v = parse_double(fields[c]);
      if (!v)
        throw LoadError("row " + std::to_string(row) + ", column '" + header[c] +
                        "': unparseable cell '" + fields[c] + "'");
      vals.push_back(*v);
    }
    dates.push_back(*date);
    rows.push_back(std::move(vals));
  }

  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t j = 0; j < cols.size(); ++j)
      values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t][j];

  try {
    return TimeSeriesPanel(std::move(dates), std::move(names), std::move(values));
  } catch (const LoadError&) {
    throw;
  } catch (const ValidationError& e) {
    throw LoadError("'" + path.string() + "': " + e.what());
  }
}

void save_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path,
                const std::string& date_header) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << date_header;
  for (const auto& n : panel.names()) out << ',' << n;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << format_iso_date(panel.timestamps()[t]);
    for (Eigen::Index j = 0; j < panel.cols(); ++j) out << ',' << shortest(panel.values()(t, j));
    out << '\n';
  }
}

IntradayReturnSet load_intraday(const std::filesystem::path& path, std::string interval) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw LoadError("'" + path.string() + "': missing header row");
  const auto header = split_csv_line(line);
  auto col = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw LoadError(std::string("intraday file lacks column '") + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_date = col("date"), c_series = col("series"), c_ret = col("return");
  col("time");

  IntradayReturnSet set;
  set.interval = std::move(interval);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw LoadError("row " + std::to_string(row) + ": wrong field count");
    auto date = parse_iso_date(f[c_date]);
    if (!date) throw LoadError("row " + std::to_string(row) + ", column 'date': unparseable date");
    auto r = parse_double(f[c_ret]);
    if (!r) throw LoadError("row " + std::to_string(row) + ", column 'return': unparseable cell");
    set.add(*date, f[c_series], *r);
  }
  return set;
}

TimeSeriesPanel realized_log_volatility(const IntradayReturnSet& returns, double power) {
  if (!(power > 0.0)) throw ValidationError("rv power must be positive");
  std::set<Date> date_set;
  for (const auto& [key, _] : returns.returns) date_set.insert(key.first);
  if (date_set.empty()) throw ValidationError("no intraday returns");
  const std::vector<Date> dates(date_set.begin(), date_set.end());
  const auto& names = returns.series_order;

  Matrix values(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t t = 0; t < dates.size(); ++t) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      auto it = returns.returns.find({dates[t], names[j]});
      if (it == returns.returns.end() || it->second.empty())
        throw ValidationError("no returns for series '" + names[j] + "' on " +
                              format_iso_date(dates[t]));
      double rv = 0.0;
      for (double r : it->second) rv += r * r;
      if (!(rv > 0.0))
        throw ValidationError("all-zero returns for series '" + names[j] + "' on " +
                              format_iso_date(dates[t]) + " (log of zero)");
      values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = power * std::log(rv);
    }
  }
  return TimeSeriesPanel(dates, names, std::move(values));
}

TimeSeriesPanel window(const TimeSeriesPanel& panel, Eigen::Index start, Eigen::Index length) {
  if (start < 0 || length < 0 || start + length > panel.rows())
    throw BoundsError("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                      ") outside panel of " + std::to_string(panel.rows()) + " rows");
  std::vector<Date> ts(panel.timestamps().begin() + start,
                       panel.timestamps().begin() + start + length);
  return TimeSeriesPanel(std::move(ts), panel.names(), panel.values().middleRows(start, length));
}

} // namespace freqconn
