#include "freqconn/bootstrap.hpp"

#include "freqconn/parallel.hpp"
#include "freqconn/rng.hpp"
#include "freqconn/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace freqconn {

std::string to_string(InnovationMode mode) {
  return mode == InnovationMode::gaussian ? "gaussian" : "resample_residuals";
}

InnovationMode innovation_mode_from_string(const std::string& text) {
  if (text == "gaussian") return InnovationMode::gaussian;
  if (text == "resample_residuals" || text == "resample") return InnovationMode::resample_residuals;
  throw ValidationError("unknown innovation mode '" + text + "'");
}

void BootstrapConfig::validate() const {
  if (replications < 2) throw ValidationError("bootstrap needs at least 2 replications");
  if (burn_in < 0) throw ValidationError("bootstrap burn-in must be nonnegative");
  if (quantiles.empty()) throw ValidationError("bootstrap needs at least one quantile");
  for (double q : quantiles)
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("bootstrap quantiles must lie strictly inside (0, 1)");
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - double(lo)) * (values[hi] - values[lo]);
}

namespace {

constexpr int kAttemptsPerReplication = 10;

Matrix symmetric_sqrt(const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Matrix draw_innovations(const VarModel<double>& model, const Matrix& centered, const Matrix& root,
                        InnovationMode mode, Eigen::Index rows, std::mt19937_64& rng) {
  const Eigen::Index n = model.dim();
  Matrix e(rows, n);
  if (mode == InnovationMode::gaussian) {
    std::normal_distribution<double> normal;
    for (Eigen::Index t = 0; t < rows; ++t)
      for (Eigen::Index j = 0; j < n; ++j) e(t, j) = normal(rng);
    return e * root; // root is symmetric
  }
  std::uniform_int_distribution<Eigen::Index> pick(0, centered.rows() - 1);
  for (Eigen::Index t = 0; t < rows; ++t) e.row(t) = centered.row(pick(rng));
  return e;
}

} // namespace

BootstrapResult bootstrap_window(const VarModel<double>& model, Eigen::Index sample_length,
                                 const BootstrapConfig& cfg, const MeasureEvaluator& evaluate) {
  cfg.validate();
  const double radius = stability(model);
  if (!(radius < 1.0))
    throw InstabilityError("bootstrap refused: fitted model is nonstationary (spectral radius " +
                           std::to_string(radius) + ")");
  if (cfg.innovation_mode == InnovationMode::resample_residuals && model.residuals.rows() < 2)
    throw ValidationError("residual resampling needs a fitted model with residuals");

  BootstrapResult out;
  out.point = evaluate(model);
  const Eigen::Index m = out.point.size();
  const auto reps = static_cast<std::size_t>(cfg.replications);

  Matrix centered;
  if (model.residuals.rows() > 0)
    centered = model.residuals.rowwise() - model.residuals.colwise().mean();
  const Matrix root = symmetric_sqrt(model.sigma);

  out.draws.resize(cfg.replications, m);
  std::vector<std::size_t> redraws(reps, 0);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    for (int attempt = 0; attempt < kAttemptsPerReplication; ++attempt) {
      auto rng = keyed_stream(cfg.seed, {0xB007u, r, static_cast<std::uint64_t>(attempt)});
      try {
        const Matrix e = draw_innovations(model, centered, root, cfg.innovation_mode,
                                          sample_length + cfg.burn_in, rng);
        const Matrix x = simulate_var(model.phi, model.intercept, e, cfg.burn_in);
        const Vector v = evaluate(estimate_var(x, model.spec));
        if (!v.allFinite()) throw NumericalError("non-finite measure");
        out.draws.row(static_cast<Eigen::Index>(r)) = v.transpose();
        return;
      } catch (const std::runtime_error&) {
        ++redraws[r];
      }
    }
    throw NumericalError("bootstrap replication " + std::to_string(r) + " failed " +
                         std::to_string(kAttemptsPerReplication) + " consecutive draws");
  });
  for (auto c : redraws) out.redraws += c;

  out.mean = out.draws.colwise().mean().transpose();
  out.bias = cfg.bias_correct ? Vector(out.mean - out.point) : Vector::Zero(m);
  out.corrected = (out.point - out.bias).cwiseMax(cfg.lower_bound).cwiseMin(cfg.upper_bound);
  out.bands.resize(static_cast<Eigen::Index>(cfg.quantiles.size()), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    std::vector<double> col(out.draws.col(j).data(), out.draws.col(j).data() + out.draws.rows());
    for (std::size_t q = 0; q < cfg.quantiles.size(); ++q) {
      const double v = quantile(col, cfg.quantiles[q]) - out.bias(j);
      out.bands(static_cast<Eigen::Index>(q), j) = std::clamp(v, cfg.lower_bound, cfg.upper_bound);
    }
  }
  return out;
}

} // namespace freqconn
