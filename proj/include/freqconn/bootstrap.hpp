#pragma once

#include "freqconn/var.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace freqconn {

enum class InnovationMode { gaussian, resample_residuals };

std::string to_string(InnovationMode mode);
InnovationMode innovation_mode_from_string(const std::string& text);

struct BootstrapConfig {
  int replications = 500;
  InnovationMode innovation_mode = InnovationMode::resample_residuals;
  std::uint64_t seed = 0;
  std::vector<double> quantiles{0.05, 0.95};
  bool bias_correct = true;
  int burn_in = 100;
  unsigned threads = 1;
  /// Measures are clamped to this admissible range after bias correction.
  double lower_bound = 0.0;
  double upper_bound = 100.0;

  void validate() const;
};

/// Maps a fitted model to a flat vector of measures.
using MeasureEvaluator = std::function<Vector(const VarModel<double>&)>;

struct BootstrapResult {
  Vector point;     // evaluator on the original fit
  Vector mean;      // mean over replications
  Vector bias;      // mean - point (zero when bias correction is off)
  Vector corrected; // point - bias, clamped
  Matrix bands;     // quantiles.size() x measures, shifted by -bias and clamped
  Matrix draws;     // replications x measures
  std::size_t redraws = 0;
};

/// Simulates panels of `sample_length` observations from the fitted VAR,
/// re-estimates with the same specification and summarizes the measures.
/// A replication that fails estimation or evaluation is redrawn on a fresh
/// sub-stream, at most ten times.
BootstrapResult bootstrap_window(const VarModel<double>& model, Eigen::Index sample_length,
                                 const BootstrapConfig& cfg, const MeasureEvaluator& evaluate);

/// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> values, double q);

} // namespace freqconn
