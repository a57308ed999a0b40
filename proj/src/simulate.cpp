#include "freqconn/simulate.hpp"

#include "freqconn/parallel.hpp"
#include "freqconn/rng.hpp"
#include "freqconn/serialize.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace freqconn {

Matrix simulate_var(const std::vector<Matrix>& phi, const Vector& intercept, const Matrix& innovations,
                    Eigen::Index burn) {
  const Eigen::Index total = innovations.rows(), n = innovations.cols();
  if (burn < 0 || burn >= total) throw ValidationError("burn-in must leave at least one observation");
  const auto p = static_cast<Eigen::Index>(phi.size());
  Matrix x = Matrix::Zero(total, n);
  for (Eigen::Index t = 0; t < total; ++t) {
    Vector xt = intercept + innovations.row(t).transpose();
    for (Eigen::Index j = 1; j <= p && j <= t; ++j) xt.noalias() += phi[j - 1] * x.row(t - j).transpose();
    x.row(t) = xt.transpose();
  }
  return x.bottomRows(total - burn);
}

Matrix BivariateSpec::phi() const {
  Matrix a(2, 2);
  a << beta1, s, s, beta2;
  return a;
}

Matrix BivariateSpec::sigma() const {
  Matrix m(2, 2);
  m << 1.0, rho, rho, 1.0;
  return m;
}

VarModel<double> BivariateSpec::population_model() const {
  if (!(rho > -1.0 && rho < 1.0)) throw ValidationError("rho must lie in (-1, 1)");
  auto m = var_from_coefficients<double>({phi()}, sigma());
  m.spec.include_intercept = false;
  m.z = 2;
  return m;
}

TimeSeriesPanel generate(const BivariateSpec& spec, std::mt19937_64& rng) {
  const auto model = spec.population_model();
  if (spec.require_stationary) {
    const double radius = stability(model);
    if (!(radius < 1.0))
      throw InstabilityError("bivariate spec is nonstationary (spectral radius " + std::to_string(radius) + ")");
  }
  if (spec.T < 2 || spec.burn < 0) throw ValidationError("need T >= 2 and burn >= 0");
  const Eigen::Index rows = spec.T + spec.burn;
  std::normal_distribution<double> normal;
  const double c = std::sqrt(1.0 - spec.rho * spec.rho);
  Matrix e(rows, 2);
  for (Eigen::Index t = 0; t < rows; ++t) {
    const double z1 = normal(rng), z2 = normal(rng);
    e(t, 0) = z1;
    e(t, 1) = spec.rho * z1 + c * z2;
  }
  Matrix x = simulate_var(model.phi, Vector::Zero(2), e, spec.burn);
  return TimeSeriesPanel(business_days(Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}},
                                       static_cast<std::size_t>(spec.T)),
                         {"x1", "x2"}, std::move(x));
}

TimeSeriesPanel generate(const BivariateSpec& spec) {
  auto rng = keyed_stream(spec.seed, {});
  return generate(spec, rng);
}

BandMeasures population_connectedness(const BivariateSpec& spec, std::size_t horizon,
                                      const BandPartition& partition) {
  const auto model = spec.population_model();
  const double radius = stability(model);
  if (!(radius < 1.0))
    throw InstabilityError("population model is nonstationary (spectral radius " + std::to_string(radius) + ")");
  return analyze(model, horizon, partition, false).measures.headline();
}

namespace {

MomentSummary moments(const Matrix& draws) {
  MomentSummary m;
  m.mean = draws.colwise().mean().transpose();
  const Matrix centered = draws.rowwise() - m.mean.transpose();
  m.sd = (centered.colwise().squaredNorm() / double(draws.rows() - 1)).cwiseSqrt().transpose();
  return m;
}

constexpr int kMaxRedraws = 1000;

} // namespace

SimulationTable run_study(const std::vector<BivariateSpec>& grid, int replications,
                          const BandPartition& partition, std::size_t horizon, std::uint64_t seed,
                          unsigned threads) {
  if (replications < 2) throw ValidationError("a study needs at least 2 replications");
  const auto reps = static_cast<std::size_t>(replications);
  const auto width = static_cast<Eigen::Index>(1 + 2 * partition.size());
  VarSpec fitted;
  fitted.p = 1;
  fitted.include_intercept = false;

  std::vector<Matrix> with(grid.size(), Matrix(replications, width));
  std::vector<Matrix> without(grid.size(), Matrix(replications, width));
  std::vector<std::size_t> redraws(grid.size() * reps, 0);

  parallel_for(grid.size() * reps, threads, [&](std::size_t task) {
    const std::size_t cell = task / reps, rep = task % reps;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxRedraws)
        throw NumericalError("study cell " + std::to_string(cell) + ": no stationary fit after " +
                             std::to_string(kMaxRedraws) + " draws");
      auto rng = keyed_stream(seed, {cell, rep, static_cast<std::uint64_t>(attempt)});
      const auto panel = generate(grid[cell], rng);
      const auto model = estimate_var(panel, fitted);
      if (!(stability(model) < 1.0)) {
        ++redraws[task];
        continue;
      }
      const auto r = analyze(model, horizon, partition, true);
      with[cell].row(static_cast<Eigen::Index>(rep)) = r.measures.headline().flatten().transpose();
      without[cell].row(static_cast<Eigen::Index>(rep)) = r.decorrelated->headline().flatten().transpose();
      return;
    }
  });

  SimulationTable table;
  table.partition = partition;
  table.horizon = horizon;
  table.replications = replications;
  table.seed = seed;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    StudyCell cell;
    cell.spec = grid[c];
    cell.with_correlation = moments(with[c]);
    cell.decorrelated = moments(without[c]);
    for (std::size_t r = 0; r < reps; ++r) cell.redraws += redraws[c * reps + r];
    table.cells.push_back(std::move(cell));
  }
  return table;
}

std::vector<BivariateSpec> load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open grid '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw LoadError("grid '" + path.string() + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) {
      f.erase(0, f.find_first_not_of(" \t\r"));
      f.erase(f.find_last_not_of(" \t\r") + 1);
      header.push_back(f);
    }
  }
  for (const char* required : {"beta1", "beta2", "s", "rho"})
    if (std::find(header.begin(), header.end(), required) == header.end())
      throw LoadError(std::string("grid lacks column '") + required + "'");

  std::vector<BivariateSpec> grid;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::map<std::string, double> v;
    std::size_t c = 0;
    for (std::string f; std::getline(ss, f, ','); ++c) {
      if (c >= header.size()) throw LoadError("grid row " + std::to_string(row) + ": too many fields");
      try {
        std::size_t used = 0;
        v[header[c]] = std::stod(f, &used);
        if (f.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw LoadError("grid row " + std::to_string(row) + ", column '" + header[c] + "': unparseable cell");
      }
    }
    if (c != header.size()) throw LoadError("grid row " + std::to_string(row) + ": wrong field count");
    BivariateSpec s;
    s.beta1 = v["beta1"];
    s.beta2 = v["beta2"];
    s.s = v["s"];
    s.rho = v["rho"];
    if (v.count("T")) s.T = static_cast<int>(v["T"]);
    if (v.count("burn")) s.burn = static_cast<int>(v["burn"]);
    grid.push_back(s);
  }
  return grid;
}

namespace {

std::string two(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void spec_fields(std::ostream& out, const BivariateSpec& s) {
  out << two(s.beta1) << ',' << two(s.beta2) << ',' << two(s.s) << ',' << two(s.rho);
}

} // namespace

void write_table_csv(std::ostream& out, const SimulationTable& table) {
  const auto names = measure_names(table.partition);
  out << "beta1,beta2,s,rho,T,stat";
  for (const auto& n : names) out << ",corr:" << n;
  for (const auto& n : names) out << ",nocorr:" << n;
  out << '\n';
  for (const auto& cell : table.cells) {
    for (int stat = 0; stat < 2; ++stat) {
      spec_fields(out, cell.spec);
      out << ',' << cell.spec.T << ',' << (stat == 0 ? "mean" : "sd");
      const Vector& a = stat == 0 ? cell.with_correlation.mean : cell.with_correlation.sd;
      const Vector& b = stat == 0 ? cell.decorrelated.mean : cell.decorrelated.sd;
      for (Eigen::Index i = 0; i < a.size(); ++i) out << ',' << two(a(i));
      for (Eigen::Index i = 0; i < b.size(); ++i) out << ',' << two(b(i));
      out << '\n';
    }
  }
}

nlohmann::json to_json(const SimulationTable& table) {
  const auto names = measure_names(table.partition);
  auto summary = [&](const MomentSummary& m) {
    Json j = Json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      j[names[i]] = {{"mean", m.mean(ii)}, {"sd", m.sd(ii)}};
    }
    return j;
  };
  Json cells = Json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"beta1", c.spec.beta1},
                     {"beta2", c.spec.beta2},
                     {"s", c.spec.s},
                     {"rho", c.spec.rho},
                     {"T", c.spec.T},
                     {"burn", c.spec.burn},
                     {"redraws", c.redraws},
                     {"with_correlation", summary(c.with_correlation)},
                     {"decorrelated", summary(c.decorrelated)}});
  }
  Json bands = Json::array();
  for (const auto& b : table.partition.bands()) bands.push_back({{"label", b.label}, {"lower", b.lower}, {"upper", b.upper}});
  return {{"horizon", table.horizon},
          {"replications", table.replications},
          {"seed", table.seed},
          {"fitted_model", "VAR(1) without intercept"},
          {"bands", bands},
          {"cells", cells}};
}

void write_population_csv(std::ostream& out, const std::vector<BivariateSpec>& grid, std::size_t horizon,
                          const BandPartition& partition) {
  out << "beta1,beta2,s,rho";
  for (const auto& n : measure_names(partition)) out << ',' << n;
  out << '\n';
  for (const auto& spec : grid) {
    spec_fields(out, spec);
    const Vector v = population_connectedness(spec, horizon, partition).flatten();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << two(v(i));
    out << '\n';
  }
}

} // namespace freqconn
