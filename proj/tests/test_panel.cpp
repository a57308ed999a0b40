#include <doctest.h>

#include "freqconn/panel.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace freqconn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name, const std::string& body) {
  const auto dir = fs::temp_directory_path() / "freqconn_panel_tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

std::string load_error(const fs::path& p) {
  try {
    load_panel(p);
  } catch (const LoadError& e) {
    return e.what();
  }
  return {};
}

TimeSeriesPanel ramp(Eigen::Index T) {
  Matrix v(T, 2);
  for (Eigen::Index t = 0; t < T; ++t) v.row(t) << double(t), std::sin(double(t));
  return {business_days(*parse_iso_date("2001-01-01"), static_cast<std::size_t>(T)), {"a", "b"}, v};
}

} // namespace

TEST_CASE("well-formed csv loads with file column order") {
  const auto p = scratch("ok.csv", "date,x,y\n2020-01-02,1.5,2\n2020-01-03,2.5,-1\n2020-01-06,0.5,4\n");
  const auto panel = load_panel(p);
  CHECK(panel.rows() == 3);
  CHECK(panel.cols() == 2);
  CHECK(panel.names() == std::vector<std::string>{"x", "y"});
  CHECK(panel.values()(1, 1) == -1.0);
  CHECK(format_iso_date(panel.timestamps()[2]) == "2020-01-06");
}

TEST_CASE("series filter fixes the column order") {
  const auto p = scratch("filter.csv", "date,x,y,z\n2020-01-02,1,2,3\n2020-01-03,2,1,5\n2020-01-06,0,4,4\n");
  const auto panel = load_panel(p, "date", std::vector<std::string>{"z", "x"});
  CHECK(panel.names() == std::vector<std::string>{"z", "x"});
  CHECK(panel.values()(0, 0) == 3.0);
  CHECK_THROWS_AS(load_panel(p, "date", std::vector<std::string>{"w"}), LoadError);
}

TEST_CASE("load errors name the row and column") {
  const auto empty = load_error(scratch("empty.csv", "date,x,y\n2020-01-02,1,2\n2020-01-03,,1\n"));
  CHECK(empty.find("row 2") != std::string::npos);
  CHECK(empty.find("'x'") != std::string::npos);

  const auto junk = load_error(scratch("junk.csv", "date,x,y\n2020-01-02,1,2\n2020-01-03,3,abc\n"));
  CHECK(junk.find("'y'") != std::string::npos);

  CHECK(load_error(scratch("dup.csv", "date,x\n2020-01-02,1\n2020-01-02,2\n2020-01-03,1\n")).find("duplicate") !=
        std::string::npos);
  CHECK_FALSE(load_error(scratch("order.csv", "date,x\n2020-01-03,1\n2020-01-02,2\n")).empty());
  CHECK(load_error(scratch("const.csv", "date,x,y\n2020-01-02,1,1\n2020-01-03,1,2\n")).find("constant") !=
        std::string::npos);
  CHECK_FALSE(load_error(scratch("nan.csv", "date,x\n2020-01-02,nan\n2020-01-03,1\n")).empty());
  CHECK_FALSE(load_error(fs::temp_directory_path() / "freqconn_no_such_file.csv").empty());
}

TEST_CASE("save then load is the identity") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Matrix v(50, 3);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = normal(rng) * 1e3;
  const TimeSeriesPanel panel(business_days(*parse_iso_date("2010-03-01"), 50), {"a", "b", "c"}, v);
  const auto p = fs::temp_directory_path() / "freqconn_panel_tests" / "roundtrip.csv";
  save_panel(panel, p);
  const auto back = load_panel(p);
  CHECK(back.names() == panel.names());
  CHECK(back.timestamps() == panel.timestamps());
  CHECK(back.values() == panel.values()); // shortest round-trip text is exact
}

TEST_CASE("realized log volatility sums squared returns") {
  IntradayReturnSet set;
  const auto d1 = *parse_iso_date("2020-01-02");
  const auto d2 = *parse_iso_date("2020-01-03");
  set.add(d1, "A", 0.1);
  set.add(d1, "A", -0.1);
  for (int i = 0; i < 78; ++i) set.add(d2, "A", 0.01);
  set.add(d2, "B", 0.2);
  set.add(d1, "B", 0.3);
  const auto rv = realized_log_volatility(set);
  CHECK(rv.rows() == 2); // one row per distinct date
  CHECK(rv.values()(0, 0) == doctest::Approx(-3.912023).epsilon(1e-7));
  CHECK(rv.values()(1, 0) == doctest::Approx(-4.853632).epsilon(1e-7));
  CHECK(realized_log_volatility(set, 0.5).values()(0, 0) == doctest::Approx(0.5 * std::log(0.02)));

  IntradayReturnSet zero;
  zero.add(d1, "A", 0.0);
  zero.add(d1, "A", 0.0);
  zero.add(d2, "A", 0.1);
  CHECK_THROWS_AS(realized_log_volatility(zero), ValidationError);
}

TEST_CASE("intraday csv feeds the realized volatility panel") {
  const auto p = scratch("intraday.csv",
                         "date,time,series,return\n2020-01-02,09:35,A,0.1\n2020-01-02,09:40,A,-0.1\n"
                         "2020-01-02,09:35,B,0.2\n2020-01-03,09:35,A,0.05\n2020-01-03,09:35,B,0.01\n");
  const auto rv = realized_log_volatility(load_intraday(p));
  CHECK(rv.names() == std::vector<std::string>{"A", "B"});
  CHECK(rv.values()(0, 0) == doctest::Approx(std::log(0.02)));
  CHECK(rv.values()(1, 1) == doctest::Approx(std::log(1e-4)));
}

TEST_CASE("window slices rows exactly") {
  const auto panel = ramp(10);
  const auto same = window(panel, 0, 10);
  CHECK(same.values() == panel.values());
  CHECK(same.timestamps() == panel.timestamps());
  const auto mid = window(panel, 3, 4);
  CHECK(mid.rows() == 4);
  CHECK(mid.values() == panel.values().middleRows(3, 4));
  CHECK(mid.names() == panel.names());
  CHECK_THROWS_AS(window(panel, 8, 5), BoundsError);
  CHECK_THROWS_AS(window(panel, -1, 2), BoundsError);
}

TEST_CASE("business days skip weekends") {
  const auto days = business_days(*parse_iso_date("2000-01-07"), 3); // a Friday
  CHECK(format_iso_date(days[1]) == "2000-01-10");
  CHECK_FALSE(parse_iso_date("2000-02-30"));
  CHECK_FALSE(parse_iso_date("20000101"));
}
