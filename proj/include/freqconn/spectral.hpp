#pragma once

#include "freqconn/core.hpp"
#include "freqconn/fevd.hpp"
#include "freqconn/var.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace freqconn {

/// Half-open band (lower, upper] of angular frequencies in [0, pi]. A band
/// whose lower edge is 0 also owns the zero frequency.
struct FrequencyBand {
  double lower = 0.0;
  double upper = kPi;
  std::string label;

  static FrequencyBand make(double lower, double upper, std::string label = {});
  /// Band of periods (shortest, longest] in observations; longest may be +inf.
  static FrequencyBand from_periods(double shortest, double longest, std::string label = {});
};

inline FrequencyBand FrequencyBand::make(double lower, double upper, std::string label) {
  constexpr double tol = 1e-12;
  if (std::abs(upper - kPi) < tol) upper = kPi;
  if (std::abs(lower) < tol) lower = 0.0;
  if (!(lower >= 0.0 && lower < upper && upper <= kPi))
    throw ValidationError("frequency band needs 0 <= a < b <= pi, got (" + std::to_string(lower) +
                          ", " + std::to_string(upper) + "]");
  if (label.empty()) label = "(" + std::to_string(lower) + "," + std::to_string(upper) + "]";
  return {lower, upper, std::move(label)};
}

inline FrequencyBand FrequencyBand::from_periods(double shortest, double longest, std::string label) {
  if (!(shortest > 0.0 && shortest < longest))
    throw ValidationError("period band needs 0 < shortest < longest");
  const double upper = std::min(kPi, 2.0 * kPi / shortest);
  const double lower = std::isinf(longest) ? 0.0 : 2.0 * kPi / longest;
  return make(lower, upper, std::move(label));
}

/// Ordered list of bands. `checked` additionally enforces the partition
/// property: disjoint half-open bands whose union is (0, pi].
class BandPartition {
public:
  BandPartition() = default;
  explicit BandPartition(std::vector<FrequencyBand> bands) : bands_(std::move(bands)) {
    if (bands_.empty()) throw ValidationError("band list is empty");
  }

  static BandPartition checked(std::vector<FrequencyBand> bands);
  static BandPartition full() { return BandPartition({FrequencyBand::make(0.0, kPi, "(0,pi]")}); }
  /// (pi/2, pi], (pi/4, pi/2], (0, pi/4]: the simulation-table layout.
  static BandPartition simulation_default();

  [[nodiscard]] const std::vector<FrequencyBand>& bands() const noexcept { return bands_; }
  [[nodiscard]] std::size_t size() const noexcept { return bands_.size(); }
  [[nodiscard]] const FrequencyBand& operator[](std::size_t i) const { return bands_[i]; }
  [[nodiscard]] bool is_partition() const;

private:
  std::vector<FrequencyBand> bands_;
};

/// Parses the band grammar "a-b,c-d,...[:days|:rad]". Days bands are periods
/// (`inf` allowed as the long end only); rad bands accept numbers and
/// multiples of pi such as `pi/4` or `3pi/4`. No suffix means rad.
BandPartition parse_bands(const std::string& text, bool require_partition = true);

/// Grid indices k in [0, H) whose folded frequency min(k, H-k) * 2 pi / H lies
/// in (lower, upper]; mirrored negative frequencies are included and k = 0
/// belongs to a band with lower edge 0.
std::vector<std::size_t> band_indices(const FrequencyBand& band, std::size_t grid);

/// Generalized causation spectrum and spectral weights on the H-point grid.
template <typename Scalar>
struct CausationSpectrum {
  std::size_t grid = 0;
  std::vector<Mat<Scalar>> f;   // f[k](j, l)
  Mat<Scalar> power;            // H x n, (Psi(w) Sigma Psi*(w))_jj
  Mat<Scalar> gamma;            // H x n, power normalized over the grid per variable
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> undefined; // H x n zero-power points
  std::size_t undefined_count = 0;
  Scalar max_imag_residue = Scalar(0); // largest |Im| of the accumulated power sums

  [[nodiscard]] Eigen::Index dim() const { return power.cols(); }
  [[nodiscard]] double omega(std::size_t k) const { return 2.0 * kPi * double(k) / double(grid); }
};

template <typename Scalar>
CausationSpectrum<Scalar> causation_spectrum(const MaRepresentation<Scalar>& ma, const Mat<Scalar>& sigma) {
  detail::check_sigma(sigma);
  const std::size_t H = ma.psi_hat.size();
  const Eigen::Index n = sigma.rows();
  using C = std::complex<Scalar>;
  const CMat<Scalar> csigma = sigma.template cast<C>();
  const Vec<Scalar> inv_sigma_diag = sigma.diagonal().cwiseInverse();

  CausationSpectrum<Scalar> cs;
  cs.grid = H;
  cs.f.assign(H, Mat<Scalar>::Zero(n, n));
  cs.power = Mat<Scalar>::Zero(static_cast<Eigen::Index>(H), n);
  cs.gamma = Mat<Scalar>::Zero(static_cast<Eigen::Index>(H), n);
  cs.undefined.setConstant(static_cast<Eigen::Index>(H), n, false);

  std::vector<Mat<Scalar>> abs2(H);
  for (std::size_t k = 0; k < H; ++k) {
    const CMat<Scalar> ps = ma.psi_hat[k] * csigma;
    abs2[k] = ps.cwiseAbs2();
    for (Eigen::Index j = 0; j < n; ++j) {
      const C pw = ps.row(j).dot(ma.psi_hat[k].row(j)); // conjugates the first argument
      cs.power(static_cast<Eigen::Index>(k), j) = pw.real();
      cs.max_imag_residue = std::max(cs.max_imag_residue, std::abs(pw.imag()));
    }
  }

  const Vec<Scalar> totals = cs.power.colwise().sum().transpose();
  const Scalar tiny = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  for (std::size_t k = 0; k < H; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar pw = cs.power(kk, j);
      if (!(pw > tiny * totals(j))) {
        cs.undefined(kk, j) = true;
        ++cs.undefined_count;
        continue;
      }
      cs.gamma(kk, j) = pw / totals(j);
      cs.f[k].row(j) = abs2[k].row(j).cwiseProduct(inv_sigma_diag.transpose()) / pw;
    }
  }
  return cs;
}

/// Weighted sum of the causation spectrum over an explicit index set.
template <typename Scalar>
Mat<Scalar> band_theta(const CausationSpectrum<Scalar>& cs, const std::vector<std::size_t>& indices) {
  const Eigen::Index n = cs.dim();
  Mat<Scalar> theta = Mat<Scalar>::Zero(n, n);
  for (std::size_t k : indices) {
    const auto kk = static_cast<Eigen::Index>(k);
    theta += cs.gamma.row(kk).transpose().asDiagonal() * cs.f[k];
  }
  return theta;
}

template <typename Scalar>
Mat<Scalar> band_theta(const CausationSpectrum<Scalar>& cs, const FrequencyBand& band) {
  return band_theta(cs, band_indices(band, cs.grid));
}

template <typename Scalar>
Mat<Scalar> full_theta(const CausationSpectrum<Scalar>& cs) {
  std::vector<std::size_t> all(cs.grid);
  for (std::size_t k = 0; k < cs.grid; ++k) all[k] = k;
  return band_theta(cs, all);
}

template <typename Scalar>
struct SpectralDecomposition {
  BandPartition bands;
  std::size_t grid = 0;
  Mat<Scalar> theta_full;
  Mat<Scalar> theta_tilde_full;
  Scalar total = Scalar(0);
  std::vector<Mat<Scalar>> theta;       // per band, unscaled
  std::vector<Mat<Scalar>> theta_tilde; // per band, scaled by full-grid row sums
  std::vector<std::optional<Scalar>> within;
  std::vector<Scalar> frequency;
  std::vector<DirectionalSummary<Scalar>> directional;
  std::size_t undefined_count = 0;
};

/// Within and frequency connectedness per band:
///   within_d    = 100 (1 - tr(T_d) / sum(T_d))
///   frequency_d = 100 (sum(T_d) - tr(T_d)) / sum(T_full)
/// where T_d is the band decomposition scaled by full-grid row sums.
template <typename Scalar>
SpectralDecomposition<Scalar> band_connectedness(const CausationSpectrum<Scalar>& cs,
                                                 const BandPartition& partition) {
  SpectralDecomposition<Scalar> out;
  out.bands = partition;
  out.grid = cs.grid;
  out.undefined_count = cs.undefined_count;
  out.theta_full = full_theta(cs);
  const Vec<Scalar> rs = out.theta_full.rowwise().sum();
  const auto scale = rs.cwiseInverse().asDiagonal();
  out.theta_tilde_full = scale * out.theta_full;
  const Scalar full_sum = out.theta_tilde_full.sum();
  out.total = connectedness_index(out.theta_tilde_full);

  for (const auto& band : partition.bands()) {
    Mat<Scalar> th = band_theta(cs, band);
    Mat<Scalar> tt = scale * th;
    const Scalar s = tt.sum(), tr = tt.trace();
    out.within.push_back(s > Scalar(0) ? std::optional<Scalar>(Scalar(100) * (Scalar(1) - tr / s))
                                       : std::nullopt);
    out.frequency.push_back(Scalar(100) * (s - tr) / full_sum);
    out.directional.push_back(directional(tt));
    out.theta.push_back(std::move(th));
    out.theta_tilde.push_back(std::move(tt));
  }
  return out;
}

template <typename Scalar>
SpectralDecomposition<Scalar> band_connectedness(const MaRepresentation<Scalar>& ma,
                                                 const Mat<Scalar>& sigma,
                                                 const BandPartition& partition) {
  return band_connectedness(causation_spectrum(ma, sigma), partition);
}

/// Residual covariance with contemporaneous correlation removed.
template <typename Scalar>
Mat<Scalar> decorrelate(const Mat<Scalar>& sigma) {
  return sigma.diagonal().asDiagonal();
}

} // namespace freqconn
