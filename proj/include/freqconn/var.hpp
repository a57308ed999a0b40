#pragma once

#include "freqconn/core.hpp"
#include "freqconn/panel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace freqconn {

struct VarSpec {
  int p = 1;
  bool include_intercept = true;
  /// Ridge penalty on lag coefficients; 0 disables it. Reported in every output.
  double ridge = 0.0;
  /// Design matrices with a larger 2-norm condition number are rejected
  /// unless a ridge penalty is active.
  double max_condition = 1e10;

  [[nodiscard]] int regressors(Eigen::Index n) const {
    return static_cast<int>(n) * p + (include_intercept ? 1 : 0);
  }
};

/// Fitted (or population) VAR(p). Immutable after construction.
template <typename Scalar>
struct VarModel {
  VarSpec spec;
  std::vector<Mat<Scalar>> phi; // phi[j] is the coefficient on lag j+1
  Vec<Scalar> intercept;
  Mat<Scalar> residuals; // (T - p) x n; empty for population models
  Mat<Scalar> sigma;
  int z = 0;             // degrees-of-freedom correction
  Scalar condition_number = Scalar(0);

  [[nodiscard]] Eigen::Index dim() const { return sigma.rows(); }
  [[nodiscard]] int lags() const { return static_cast<int>(phi.size()); }
  /// Effective sample length the residuals came from (T - p).
  [[nodiscard]] Eigen::Index effective_length() const { return residuals.rows(); }
};

/// Builds a coefficient-only model (no residuals) from known parameters.
template <typename Scalar>
VarModel<Scalar> var_from_coefficients(std::vector<Mat<Scalar>> phi, Mat<Scalar> sigma,
                                       std::optional<Vec<Scalar>> intercept = std::nullopt) {
  if (phi.empty()) throw ValidationError("VAR needs at least one lag matrix");
  const Eigen::Index n = sigma.rows();
  if (sigma.cols() != n) throw ValidationError("sigma must be square");
  for (const auto& a : phi)
    if (a.rows() != n || a.cols() != n) throw ValidationError("lag matrix dimension mismatch");
  VarModel<Scalar> m;
  m.spec.p = static_cast<int>(phi.size());
  m.spec.include_intercept = intercept.has_value();
  m.phi = std::move(phi);
  m.intercept = intercept.value_or(Vec<Scalar>::Zero(n));
  m.sigma = std::move(sigma);
  m.z = m.spec.regressors(n);
  return m;
}

/// Rows t = p..T-1 of [x_{t-1}', ..., x_{t-p}', 1].
template <typename Derived>
Mat<typename Derived::Scalar> lagged_design(const Eigen::MatrixBase<Derived>& data, const VarSpec& spec) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index T = data.rows(), n = data.cols(), p = spec.p;
  const Eigen::Index k = spec.regressors(n);
  Mat<Scalar> x(T - p, k);
  for (Eigen::Index j = 1; j <= p; ++j) x.middleCols((j - 1) * n, n) = data.middleRows(p - j, T - p);
  if (spec.include_intercept) x.col(k - 1).setOnes();
  return x;
}

/// Per-equation OLS through a column-pivoted QR of the lagged design.
template <typename Derived>
VarModel<typename Derived::Scalar> estimate_var(const Eigen::MatrixBase<Derived>& data,
                                                const VarSpec& spec) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index T = data.rows(), n = data.cols();
  if (spec.p < 1) throw ValidationError("lag order must be >= 1");
  if (!(spec.ridge >= 0.0)) throw ValidationError("ridge penalty must be nonnegative");
  const int k = spec.regressors(n);
  if (T - spec.p <= k)
    throw ValidationError("sample too short: T - p = " + std::to_string(T - spec.p) +
                          " must exceed " + std::to_string(k) + " regressors per equation");

  const Mat<Scalar> x = lagged_design(data, spec);
  const Mat<Scalar> y = data.bottomRows(T - spec.p);

  Eigen::JacobiSVD<Mat<Scalar>> svd(x);
  const auto& sv = svd.singularValues();
  const Scalar smin = sv(sv.size() - 1);
  const Scalar cond = smin > Scalar(0) ? sv(0) / smin : std::numeric_limits<Scalar>::infinity();
  if (spec.ridge == 0.0 && !(cond <= Scalar(spec.max_condition))) {
    std::ostringstream msg;
    msg << "singular regressor cross-product: design condition number " << double(cond)
        << " exceeds " << spec.max_condition;
    throw EstimationError(msg.str());
  }

  Mat<Scalar> b;
  if (spec.ridge > 0.0) {
    // Augmented least squares keeps the orthogonal solve: stack sqrt(lambda) I
    // under the lag columns.
    const Eigen::Index lag_cols = n * spec.p;
    Mat<Scalar> xa = Mat<Scalar>::Zero(x.rows() + lag_cols, k);
    Mat<Scalar> ya = Mat<Scalar>::Zero(y.rows() + lag_cols, n);
    xa.topRows(x.rows()) = x;
    ya.topRows(y.rows()) = y;
    xa.bottomLeftCorner(lag_cols, lag_cols).diagonal().setConstant(std::sqrt(Scalar(spec.ridge)));
    b = xa.colPivHouseholderQr().solve(ya);
  } else {
    b = x.colPivHouseholderQr().solve(y);
  }

  VarModel<Scalar> m;
  m.spec = spec;
  m.phi.reserve(spec.p);
  for (int j = 0; j < spec.p; ++j) m.phi.push_back(b.middleRows(j * n, n).transpose());
  m.intercept = spec.include_intercept ? Vec<Scalar>(b.row(k - 1).transpose()) : Vec<Scalar>::Zero(n);
  m.residuals = y - x * b;
  m.z = k;
  m.sigma = m.residuals.transpose() * m.residuals / Scalar(m.residuals.rows() - m.z);
  m.sigma = ((m.sigma + m.sigma.transpose()) / Scalar(2)).eval();
  m.condition_number = cond;
  return m;
}

inline VarModel<double> estimate_var(const TimeSeriesPanel& panel, const VarSpec& spec) {
  return estimate_var(panel.values(), spec);
}

template <typename Scalar>
Mat<Scalar> companion_matrix(const std::vector<Mat<Scalar>>& phi) {
  const Eigen::Index n = phi.front().rows(), p = static_cast<Eigen::Index>(phi.size());
  Mat<Scalar> c = Mat<Scalar>::Zero(n * p, n * p);
  for (Eigen::Index j = 0; j < p; ++j) c.block(0, j * n, n, n) = phi[j];
  if (p > 1) c.bottomLeftCorner(n * (p - 1), n * (p - 1)).setIdentity();
  return c;
}

/// Largest eigenvalue modulus of the companion matrix; < 1 means stable.
template <typename Scalar>
Scalar stability(const VarModel<Scalar>& model) {
  Eigen::EigenSolver<Mat<Scalar>> es(companion_matrix(model.phi), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Truncated MA coefficients and their H-point discrete Fourier transform,
/// psi_hat[k] = sum_h psi[h] exp(-2 pi i k h / H).
template <typename Scalar>
struct MaRepresentation {
  std::size_t horizon = 0;
  std::vector<Mat<Scalar>> psi;
  std::vector<CMat<Scalar>> psi_hat;

  [[nodiscard]] Eigen::Index dim() const { return psi.front().rows(); }
};

/// Psi_0 = I, Psi_h = sum_{j=1}^{min(h,p)} Phi_j Psi_{h-j}.
template <typename Scalar>
std::vector<Mat<Scalar>> ma_coefficients(const std::vector<Mat<Scalar>>& phi, std::size_t count) {
  const Eigen::Index n = phi.front().rows();
  std::vector<Mat<Scalar>> psi;
  psi.reserve(count);
  if (count == 0) return psi;
  psi.push_back(Mat<Scalar>::Identity(n, n));
  for (std::size_t h = 1; h < count; ++h) {
    Mat<Scalar> acc = Mat<Scalar>::Zero(n, n);
    const std::size_t upto = std::min(h, phi.size());
    for (std::size_t j = 1; j <= upto; ++j) acc.noalias() += phi[j - 1] * psi[h - j];
    psi.push_back(std::move(acc));
  }
  return psi;
}

template <typename Scalar>
std::vector<CMat<Scalar>> dft_sequence(const std::vector<Mat<Scalar>>& seq) {
  const std::size_t H = seq.size();
  const Eigen::Index rows = seq.front().rows(), cols = seq.front().cols();
  std::vector<CMat<Scalar>> out(H, CMat<Scalar>(rows, cols));
  if (H == 1) { // kissfft does not handle length one
    out[0] = seq[0].template cast<std::complex<Scalar>>();
    return out;
  }
  Eigen::FFT<Scalar> fft;
  std::vector<Scalar> in(H);
  std::vector<std::complex<Scalar>> spec;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (std::size_t h = 0; h < H; ++h) in[h] = seq[h](i, j);
      fft.fwd(spec, in);
      for (std::size_t k = 0; k < H; ++k) out[k](i, j) = spec[k];
    }
  }
  return out;
}

template <typename Scalar>
MaRepresentation<Scalar> ma_truncated(const std::vector<Mat<Scalar>>& phi, std::size_t horizon) {
  if (horizon < 1) throw ValidationError("MA horizon must be >= 1");
  MaRepresentation<Scalar> ma;
  ma.horizon = horizon;
  ma.psi = ma_coefficients(phi, horizon);
  ma.psi_hat = dft_sequence(ma.psi);
  return ma;
}

template <typename Scalar>
MaRepresentation<Scalar> ma_truncated(const VarModel<Scalar>& model, std::size_t horizon) {
  return ma_truncated(model.phi, horizon);
}

/// Per variable, the smallest H' in [1, horizon] with
/// MSE(H'+1) - MSE(H') = (Psi_H' Sigma Psi_H'')_jj < eps; nullopt when not reached.
template <typename Scalar>
std::vector<std::optional<std::size_t>> msfe_convergence(const VarModel<Scalar>& model,
                                                         std::size_t horizon, Scalar eps) {
  if (!(eps > Scalar(0))) throw ValidationError("eps must be positive");
  const auto psi = ma_coefficients(model.phi, horizon + 1);
  const Eigen::Index n = model.dim();
  std::vector<std::optional<std::size_t>> out(static_cast<std::size_t>(n));
  for (std::size_t h = 1; h <= horizon; ++h) {
    const Vec<Scalar> inc = (psi[h] * model.sigma * psi[h].transpose()).diagonal();
    for (Eigen::Index j = 0; j < n; ++j)
      if (!out[j] && inc(j) < eps) out[j] = h;
  }
  return out;
}

} // namespace freqconn
