#pragma once

#include "freqconn/fevd.hpp"
#include "freqconn/spectral.hpp"
#include "freqconn/var.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace freqconn {

/// Headline scalars of a measure set: total, within per band, frequency per band.
struct BandMeasures {
  double total = 0.0;
  std::vector<std::optional<double>> within;
  std::vector<double> frequency;

  /// [total, within..., frequency...]; an undefined within measure is NaN.
  [[nodiscard]] Vector flatten() const {
    const auto b = static_cast<Eigen::Index>(frequency.size());
    Vector v(1 + 2 * b);
    v(0) = total;
    for (Eigen::Index i = 0; i < b; ++i) {
      v(1 + i) = within[i].value_or(std::numeric_limits<double>::quiet_NaN());
      v(1 + b + i) = frequency[i];
    }
    return v;
  }
};

inline std::vector<std::string> measure_names(const BandPartition& partition) {
  std::vector<std::string> names{"total"};
  for (const auto& b : partition.bands()) names.push_back("within:" + b.label);
  for (const auto& b : partition.bands()) names.push_back("frequency:" + b.label);
  return names;
}

/// One measure set: time-domain decomposition plus its band split on the same grid.
struct MeasureSet {
  FevdMatrix<double> fevd;
  DirectionalSummary<double> directional;
  SpectralDecomposition<double> spectral;

  [[nodiscard]] double total() const { return total_connectedness(fevd); }
  [[nodiscard]] BandMeasures headline() const { return {total(), spectral.within, spectral.frequency}; }
};

/// Static connectedness report for one fitted model.
struct ConnectednessReport {
  VarModel<double> model;
  double spectral_radius = 0.0;
  std::size_t horizon = 0;
  MeasureSet measures;
  std::optional<MeasureSet> decorrelated;
};

inline MeasureSet measure_set(const MaRepresentation<double>& ma, const Matrix& sigma,
                              const BandPartition& partition) {
  MeasureSet m;
  m.fevd = gfevd(ma, sigma);
  m.directional = directional(m.fevd);
  m.spectral = band_connectedness(ma, sigma, partition);
  return m;
}

/// Runs the full decomposition on a fitted model. The time-domain horizon and
/// the spectral grid share H so the band measures reconcile exactly.
inline ConnectednessReport analyze(const VarModel<double>& model, std::size_t horizon,
                                   const BandPartition& partition, bool with_decorrelated) {
  ConnectednessReport r;
  r.model = model;
  r.spectral_radius = stability(model);
  r.horizon = horizon;
  const auto ma = ma_truncated(model, horizon);
  r.measures = measure_set(ma, model.sigma, partition);
  if (with_decorrelated) r.decorrelated = measure_set(ma, decorrelate(model.sigma), partition);
  return r;
}

} // namespace freqconn
