#include <doctest.h>

#include "freqconn/serialize.hpp"
#include "freqconn/simulate.hpp"
#include "freqconn/svg.hpp"

#include <sstream>

using namespace freqconn;

TEST_CASE("fitted models round-trip through json exactly") {
  BivariateSpec spec;
  spec.beta1 = 0.3;
  spec.s = 0.1;
  spec.rho = 0.2;
  spec.seed = 1;
  const auto m = estimate_var(generate(spec), VarSpec{2, true});
  const auto text = to_json(m).dump();
  const auto back = var_model_from_json(Json::parse(text));
  CHECK(back.phi[0] == m.phi[0]);
  CHECK(back.phi[1] == m.phi[1]);
  CHECK(back.intercept == m.intercept);
  CHECK(back.sigma == m.sigma);
  CHECK(back.z == m.z);
  CHECK(back.spec.p == 2);
  CHECK(back.spec.include_intercept);
}

TEST_CASE("matrices serialize row-major") {
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  const auto j = matrix_to_json(a);
  CHECK(j[0][2] == 3.0);
  CHECK(j[1][0] == 4.0);
  CHECK(matrix_from_json(j) == a);
  CHECK_THROWS(matrix_from_json(Json::parse("[[1,2],[3]]")));
}

TEST_CASE("report tables are in percent with six decimals") {
  Matrix s(2, 2);
  s << 1, 0.9, 0.9, 1;
  const auto model = var_from_coefficients<double>({Matrix::Zero(2, 2)}, s);
  const auto r = analyze(model, 16, BandPartition::simulation_default(), true);

  std::ostringstream fevd;
  write_fevd_csv(fevd, r.measures.fevd, {"a", "b"});
  CHECK(fevd.str().find("a,55.248619,44.751381,44.751381") != std::string::npos);

  std::ostringstream spec;
  write_spectral_csv(spec, r.measures.spectral, {"a", "b"});
  CHECK(spec.str().rfind("band,from,to,value,measure\n", 0) == 0);
  CHECK(spec.str().find("total,,,44.751381,total") != std::string::npos);

  const auto j = to_json(r, {"a", "b"});
  CHECK(j["measures"]["total"].get<double>() == doctest::Approx(44.751381));
  CHECK(j.contains("decorrelated"));
  CHECK(j["decorrelated"]["total"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("svg output escapes text and closes its root") {
  svg::LineChart chart{"a < b & c", {"2000-01-03", "2000-01-04", "2000-01-05"}, {}};
  chart.lines.push_back({"x", {1.0, std::nullopt, 3.0}, std::vector<std::optional<double>>{0.5, std::nullopt, 2.0},
                         std::vector<std::optional<double>>{1.5, std::nullopt, 4.0}});
  const auto text = svg::render(chart);
  CHECK(text.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("<polygon") != std::string::npos);

  Matrix m(2, 2);
  m << 1, std::nan(""), -2, 0;
  const auto heat = svg::heatmap("h", m, {"r1", "r2"}, {"c1", "c2"});
  CHECK(heat.find("#bbbbbb") != std::string::npos);
  CHECK(heat.find(">NA<") != std::string::npos);
}
