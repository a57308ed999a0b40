#include <doctest.h>

#include "freqconn/bootstrap.hpp"
#include "freqconn/report.hpp"
#include "freqconn/simulate.hpp"

#include <random>

using namespace freqconn;

namespace {

Matrix noise(std::uint64_t seed, Eigen::Index T, Eigen::Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix x(T, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

MeasureEvaluator evaluator(std::size_t H) {
  return [H](const VarModel<double>& m) {
    return measure_set(ma_truncated(m, H), m.sigma, BandPartition::simulation_default()).headline().flatten();
  };
}

} // namespace

TEST_CASE("type-7 quantiles") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({5}, 0.9) == 5);
  CHECK_THROWS_AS(quantile({}, 0.5), ValidationError);
}

TEST_CASE("configuration checks") {
  BootstrapConfig c;
  c.replications = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.replications = 10;
  c.quantiles = {0.0, 0.9};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(innovation_mode_from_string("gaussian") == InnovationMode::gaussian);
  CHECK_THROWS_AS(innovation_mode_from_string("block"), ValidationError);
}

TEST_CASE("null system with two replications") {
  const auto m = estimate_var(noise(1, 500, 2), VarSpec{1, true});
  BootstrapConfig c;
  c.replications = 2;
  c.seed = 10;
  const auto r = bootstrap_window(m, 500, c, evaluator(128));
  CHECK(r.corrected(0) < 2.0);
  CHECK(r.bands(1, 0) > r.bands(0, 0));
}

TEST_CASE("seed fully determines the output") {
  const auto m = estimate_var(noise(2, 300, 3), VarSpec{1, true});
  for (auto mode : {InnovationMode::gaussian, InnovationMode::resample_residuals}) {
    BootstrapConfig c;
    c.replications = 20;
    c.innovation_mode = mode;
    c.seed = 123;
    const auto a = bootstrap_window(m, 300, c, evaluator(64));
    c.threads = 4;
    const auto b = bootstrap_window(m, 300, c, evaluator(64));
    CHECK(a.bands == b.bands);
    CHECK(a.corrected == b.corrected);
    c.seed = 124;
    CHECK(bootstrap_window(m, 300, c, evaluator(64)).bands != a.bands);
  }
}

TEST_CASE("widening the quantile pair never narrows the band") {
  const auto m = estimate_var(noise(3, 300, 2), VarSpec{1, true});
  BootstrapConfig c;
  c.replications = 60;
  c.seed = 5;
  c.quantiles = {0.10, 0.50, 0.90};
  const auto narrow = bootstrap_window(m, 300, c, evaluator(64));
  c.quantiles = {0.05, 0.95};
  const auto wide = bootstrap_window(m, 300, c, evaluator(64));
  for (Eigen::Index j = 0; j < wide.bands.cols(); ++j) {
    CHECK(wide.bands(0, j) <= narrow.bands(0, j));
    CHECK(wide.bands(1, j) >= narrow.bands(2, j));
    CHECK(narrow.bands(0, j) <= narrow.bands(1, j)); // median inside the band
    CHECK(narrow.bands(1, j) <= narrow.bands(2, j));
  }
}

TEST_CASE("corrected estimate sits inside the band in most null trials") {
  int misses = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const auto m = estimate_var(noise(100 + std::uint64_t(t), 300, 2), VarSpec{1, true});
    BootstrapConfig c;
    c.replications = 50;
    c.seed = std::uint64_t(t);
    const auto r = bootstrap_window(m, 300, c, evaluator(64));
    if (!(r.bands(0, 0) <= r.corrected(0) && r.corrected(0) <= r.bands(1, 0))) ++misses;
  }
  CHECK(misses < 0.15 * trials);
}

TEST_CASE("nonstationary fits are refused") {
  auto m = var_from_coefficients<double>({Matrix::Identity(2, 2)}, Matrix::Identity(2, 2));
  BootstrapConfig c;
  c.replications = 2;
  c.innovation_mode = InnovationMode::gaussian;
  CHECK_THROWS_AS(bootstrap_window(m, 100, c, evaluator(32)), InstabilityError);
}

TEST_CASE("bootstrap mean near the published simulation mean") {
  BivariateSpec spec;
  spec.beta1 = spec.beta2 = 0.9;
  spec.s = 0.09;
  spec.seed = 2018;
  VarSpec fitted{1, false};
  const auto m = estimate_var(generate(spec), fitted);
  BootstrapConfig c;
  c.replications = 100;
  c.seed = 1;
  const auto r = bootstrap_window(m, 1000, c, evaluator(1000));
  CHECK(std::abs(r.mean(0) - 37.65) < 2 * 4.55);
  CHECK(r.corrected.minCoeff() >= 0.0);
  CHECK(r.corrected.maxCoeff() <= 100.0);
}
