#pragma once

#include "freqconn/panel.hpp"
#include "freqconn/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <vector>

namespace freqconn {

/// Runs x_t = c + sum_j Phi_j x_{t-j} + e_t from a zero start over the given
/// innovation rows and returns the last rows().size() - burn observations.
Matrix simulate_var(const std::vector<Matrix>& phi, const Vector& intercept, const Matrix& innovations,
                    Eigen::Index burn);

/// Bivariate VAR(1)
///   x1_t = beta1 x1_{t-1} + s x2_{t-1} + e1_t
///   x2_t = s x1_{t-1} + beta2 x2_{t-1} + e2_t
/// with unit-variance Gaussian innovations of correlation rho.
struct BivariateSpec {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double s = 0.0;
  double rho = 0.0;
  int T = 1000;
  int burn = 100;
  std::uint64_t seed = 0;
  /// Reject specs whose companion radius is >= 1 (population computations).
  bool require_stationary = false;

  [[nodiscard]] Matrix phi() const;
  [[nodiscard]] Matrix sigma() const;
  [[nodiscard]] VarModel<double> population_model() const;
};

TimeSeriesPanel generate(const BivariateSpec& spec);
TimeSeriesPanel generate(const BivariateSpec& spec, std::mt19937_64& rng);

/// Measures evaluated on the true coefficients, no estimation.
BandMeasures population_connectedness(const BivariateSpec& spec, std::size_t horizon,
                                      const BandPartition& partition);

struct MomentSummary {
  Vector mean; // layout of BandMeasures::flatten
  Vector sd;   // sample standard deviation
};

struct StudyCell {
  BivariateSpec spec;
  MomentSummary with_correlation;
  MomentSummary decorrelated;
  std::size_t redraws = 0;
};

struct SimulationTable {
  BandPartition partition;
  std::size_t horizon = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  std::vector<StudyCell> cells;
};

/// Monte Carlo over a grid: each replication fits a VAR(1) without intercept
/// and evaluates the measures with and without residual correlation.
/// Replications whose fit is nonstationary are redrawn on a fresh sub-stream.
SimulationTable run_study(const std::vector<BivariateSpec>& grid, int replications,
                          const BandPartition& partition, std::size_t horizon, std::uint64_t seed,
                          unsigned threads = 1);

/// CSV with header beta1,beta2,s,rho[,T,burn].
std::vector<BivariateSpec> load_grid(const std::filesystem::path& path);

/// Two rows per cell (mean, sd) in the published table layout.
void write_table_csv(std::ostream& out, const SimulationTable& table);
nlohmann::json to_json(const SimulationTable& table);

/// Population values for every grid row, in the true-value table layout.
void write_population_csv(std::ostream& out, const std::vector<BivariateSpec>& grid, std::size_t horizon,
                          const BandPartition& partition);

} // namespace freqconn
