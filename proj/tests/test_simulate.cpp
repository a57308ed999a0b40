#include <doctest.h>

#include "freqconn/simulate.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace freqconn;

namespace {

BivariateSpec make(double b1, double b2, double s, double rho) {
  BivariateSpec spec;
  spec.beta1 = b1;
  spec.beta2 = b2;
  spec.s = s;
  spec.rho = rho;
  return spec;
}

double within_on(const CausationSpectrum<double>& cs, const std::vector<std::size_t>& indices) {
  const Matrix full = full_theta(cs);
  const Vector rs = full.rowwise().sum();
  const Matrix t = rs.cwiseInverse().asDiagonal() * band_theta(cs, indices);
  return 100.0 * (1.0 - t.trace() / t.sum());
}

/// Population lag-1 autocorrelation of x1: solve vec(G) = (I - A kron A)^-1 vec(Sigma), then G1 = A G.
double yule_walker_r1(const BivariateSpec& spec) {
  const Matrix A = spec.phi();
  Matrix K(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) K(2 * i + k, 2 * j + l) = A(i, j) * A(k, l);
  const Matrix S = spec.sigma();
  Vector vs(4);
  vs << S(0, 0), S(1, 0), S(0, 1), S(1, 1); // column-major vec
  const Vector vg = (Matrix::Identity(4, 4) - K).lu().solve(vs);
  Matrix G(2, 2);
  G << vg(0), vg(2), vg(1), vg(3);
  const Matrix G1 = A * G;
  return G1(0, 0) / G(0, 0);
}

double sample_r1(const Matrix& x) {
  const Vector c = x.col(0).array() - x.col(0).mean();
  const Eigen::Index T = c.size();
  return c.head(T - 1).dot(c.tail(T - 1)) / c.squaredNorm();
}

} // namespace

TEST_CASE("independent white noises look uncorrelated") {
  auto spec = make(0, 0, 0, 0);
  spec.seed = 42;
  const auto p = generate(spec);
  CHECK(p.rows() == 1000);
  const Matrix c = p.values().rowwise() - p.values().colwise().mean();
  const double r = c.col(0).dot(c.col(1)) / (c.col(0).norm() * c.col(1).norm());
  CHECK(std::abs(r) < 4.0 / std::sqrt(1000.0));
  const Vector var = c.colwise().squaredNorm() / 999.0;
  CHECK(std::abs(var(0) - 1.0) < 0.15);
}

TEST_CASE("persistence matches the Yule-Walker autocorrelation") {
  auto spec = make(0.9, 0.9, 0.09, 0);
  const double r1 = yule_walker_r1(spec);
  CHECK(r1 == doctest::Approx(0.98).epsilon(0.02));
  spec.T = 100000;
  spec.seed = 3;
  CHECK(std::abs(sample_r1(generate(spec).values()) - r1) < 0.005);
}

TEST_CASE("generation is deterministic in the seed") {
  auto spec = make(0.5, 0.2, 0.1, 0.3);
  spec.seed = 77;
  CHECK(generate(spec).values() == generate(spec).values());
  auto other = spec;
  other.seed = 78;
  CHECK(generate(spec).values() != generate(other).values());
}

TEST_CASE("nonstationary specs are refused when required") {
  auto spec = make(1.0, 0.5, 0.0, 0.0);
  spec.require_stationary = true;
  CHECK_THROWS_AS(generate(spec), InstabilityError);
  CHECK_THROWS_AS(population_connectedness(spec, 256, BandPartition::simulation_default()), InstabilityError);
  CHECK_THROWS_AS((void)make(0, 0, 0, 1.0).population_model(), ValidationError);
}

TEST_CASE("population values") {
  const auto part = BandPartition::simulation_default();
  auto check = [&](BivariateSpec s, double total, std::vector<double> bands) {
    const auto m = population_connectedness(s, 2048, part);
    CHECK(m.total == doctest::Approx(total).epsilon(0.005 / std::max(total, 1.0)));
    for (std::size_t b = 0; b < bands.size(); ++b)
      CHECK(*m.within[b] == doctest::Approx(bands[b]).epsilon(0.005 / std::max(bands[b], 1.0)));
  };
  check(make(0, 0, 0, 0.9), 44.75, {44.75, 44.75, 44.75});
  check(make(0.9, 0.9, 0.09, 0), 40.50, {0.30, 0.89, 41.15});
  check(make(0.4, -0.4, 0.59, 0), 23.08, {23.08, 23.08, 23.08});
  check(make(0.9, -0.9, 0.09, 0), 0.45, {0.45, 0.45, 0.45});
  check(make(-0.9, -0.9, 0.09, 0.9), 41.28, {41.01, 45.22, 45.22});
}

TEST_CASE("sign flip moves the profile across half the grid") {
  const std::size_t H = 2048;
  const auto part = BandPartition::simulation_default();
  for (double rho : {0.0, 0.5, 0.9}) {
    const auto plus = make(0.9, 0.9, 0.09, rho);
    const auto minus = make(-0.9, -0.9, -0.09, rho);
    CHECK(std::abs(population_connectedness(plus, H, part).total -
                   population_connectedness(minus, H, part).total) < 1e-8);
    const auto mp = plus.population_model(), mm = minus.population_model();
    const auto cp = causation_spectrum(ma_truncated(mp, H), mp.sigma);
    const auto cm = causation_spectrum(ma_truncated(mm, H), mm.sigma);
    for (const auto& band : part.bands()) {
      const auto s = band_indices(band, H);
      std::vector<std::size_t> shifted;
      for (auto k : s) shifted.push_back((k + H / 2) % H);
      CHECK(std::abs(within_on(cp, s) - within_on(cm, shifted)) < 1e-6);
    }
  }
}

TEST_CASE("pure correlation spreads evenly over every band") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const Matrix sigma = oracle::random_spd(rng, n);
    const auto model = var_from_coefficients<double>({Matrix::Zero(n, n)}, sigma);
    const auto r = analyze(model, 256, oracle::random_partition(rng, 256), false);
    for (const auto& w : r.measures.spectral.within) CHECK(std::abs(*w - r.measures.total()) < 1e-8);
  }
}

TEST_CASE("smoke study is well formed") {
  const std::vector<BivariateSpec> grid{make(0.9, 0.9, 0.09, 0.9), make(0, 0, 0, 0)};
  const auto t = run_study(grid, 2, BandPartition::simulation_default(), 256, 1, 1);
  REQUIRE(t.cells.size() == 2);
  for (const auto& c : t.cells) {
    CHECK(c.with_correlation.sd.allFinite());
    CHECK(c.with_correlation.sd.minCoeff() >= 0.0);
    // frequency measures sum to the total in every replication, hence in the mean
    CHECK(std::abs(c.with_correlation.mean.tail(3).sum() - c.with_correlation.mean(0)) < 1e-9);
    CHECK(std::abs(c.decorrelated.mean.tail(3).sum() - c.decorrelated.mean(0)) < 1e-9);
  }
  CHECK_THROWS_AS(run_study(grid, 1, BandPartition::simulation_default(), 256, 1, 1), ValidationError);

  const auto again = run_study(grid, 2, BandPartition::simulation_default(), 256, 1, 3);
  CHECK(again.cells[0].with_correlation.mean == t.cells[0].with_correlation.mean);

  std::ostringstream csv;
  write_table_csv(csv, t);
  CHECK(csv.str().find("corr:total") != std::string::npos);
}

TEST_CASE("cell means approach population values as T grows") {
  auto spec = make(0.9, 0.9, 0.09, 0);
  spec.T = 10000;
  const auto part = BandPartition::simulation_default();
  const int R = 50;
  const auto t = run_study({spec}, R, part, 1000, 4242, 0);
  const auto pop = population_connectedness(spec, 2048, part).flatten();
  const auto& m = t.cells[0].with_correlation;
  for (Eigen::Index i = 0; i < pop.size(); ++i)
    CHECK(std::abs(m.mean(i) - pop(i)) < 3.0 * m.sd(i) / std::sqrt(double(R)) + 0.01);
}

TEST_CASE("grid files") {
  const auto dir = std::filesystem::temp_directory_path() / "freqconn_sim_tests";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "g.csv") << "beta1,beta2,s,rho,T\n0.9,0.4,0.09,0,500\n0,0,0,0.9,800\n";
  const auto g = load_grid(dir / "g.csv");
  REQUIRE(g.size() == 2);
  CHECK(g[0].beta2 == 0.4);
  CHECK(g[1].T == 800);
  CHECK(g[1].burn == 100);
  std::ofstream(dir / "bad.csv") << "beta1,beta2,s\n0,0,0\n";
  CHECK_THROWS_AS(load_grid(dir / "bad.csv"), LoadError);
  std::ofstream(dir / "junk.csv") << "beta1,beta2,s,rho\n0,x,0,0\n";
  CHECK_THROWS_AS(load_grid(dir / "junk.csv"), LoadError);
}
