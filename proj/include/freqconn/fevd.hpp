#pragma once

#include "freqconn/core.hpp"
#include "freqconn/var.hpp"

#include <cstddef>

namespace freqconn {

/// Generalized forecast-error variance decomposition at a fixed horizon.
/// theta(j, k) is the share of variable j's H-step forecast-error variance
/// attributable to shocks in variable k; theta_tilde is its row-normalized form.
template <typename Scalar>
struct FevdMatrix {
  std::size_t horizon = 0;
  Mat<Scalar> theta;
  Mat<Scalar> theta_tilde;
};

template <typename Scalar>
struct DirectionalSummary {
  Vec<Scalar> from_others; // percent
  Vec<Scalar> to_others;   // percent
  Vec<Scalar> net;         // to - from
  Mat<Scalar> pairwise_net;
  Scalar total = Scalar(0); // mean of from_others
};

namespace detail {

template <typename Scalar>
void check_sigma(const Mat<Scalar>& sigma) {
  if (sigma.rows() != sigma.cols()) throw ValidationError("sigma must be square");
  for (Eigen::Index k = 0; k < sigma.rows(); ++k)
    if (!(sigma(k, k) > Scalar(0)))
      throw DegenerateVarianceError("sigma(" + std::to_string(k) + "," + std::to_string(k) +
                                    ") is not positive");
}

template <typename Scalar>
Mat<Scalar> row_normalize(const Mat<Scalar>& m) {
  const Vec<Scalar> rs = m.rowwise().sum();
  return rs.cwiseInverse().asDiagonal() * m;
}

} // namespace detail

/// theta(j,k) = sigma_kk^-1 sum_{h<H} ((Psi_h Sigma)_jk)^2 / sum_{h<H} (Psi_h Sigma Psi_h')_jj.
template <typename Scalar>
FevdMatrix<Scalar> gfevd(const MaRepresentation<Scalar>& ma, const Mat<Scalar>& sigma,
                         std::size_t horizon) {
  detail::check_sigma(sigma);
  if (horizon < 1 || horizon > ma.psi.size())
    throw ValidationError("gfevd horizon " + std::to_string(horizon) + " outside [1, " +
                          std::to_string(ma.psi.size()) + "]");
  const Eigen::Index n = sigma.rows();
  Mat<Scalar> num = Mat<Scalar>::Zero(n, n);
  Vec<Scalar> den = Vec<Scalar>::Zero(n);
  for (std::size_t h = 0; h < horizon; ++h) {
    const Mat<Scalar> ps = ma.psi[h] * sigma;
    num += ps.cwiseAbs2();
    den += (ps.cwiseProduct(ma.psi[h])).rowwise().sum();
  }
  FevdMatrix<Scalar> f;
  f.horizon = horizon;
  f.theta = den.cwiseInverse().asDiagonal() * num * sigma.diagonal().cwiseInverse().asDiagonal();
  f.theta_tilde = detail::row_normalize(f.theta);
  return f;
}

template <typename Scalar>
FevdMatrix<Scalar> gfevd(const MaRepresentation<Scalar>& ma, const Mat<Scalar>& sigma) {
  return gfevd(ma, sigma, ma.psi.size());
}

/// 100 * (1 - trace / sum) of the scaled decomposition.
template <typename Derived>
typename Derived::Scalar connectedness_index(const Eigen::MatrixBase<Derived>& theta_tilde) {
  using Scalar = typename Derived::Scalar;
  return Scalar(100) * (Scalar(1) - theta_tilde.trace() / theta_tilde.sum());
}

template <typename Scalar>
Scalar total_connectedness(const FevdMatrix<Scalar>& f) {
  return connectedness_index(f.theta_tilde);
}

/// From/to/net spillovers of a scaled decomposition. `total` is the mean of
/// from_others, so it equals the total index for a row-stochastic input and
/// the frequency measure for a band matrix scaled by full-grid row sums.
template <typename Derived>
DirectionalSummary<typename Derived::Scalar> directional(const Eigen::MatrixBase<Derived>& theta_tilde) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = theta_tilde.rows();
  Mat<Scalar> off = theta_tilde;
  off.diagonal().setZero();
  DirectionalSummary<Scalar> d;
  d.from_others = Scalar(100) * off.rowwise().sum();
  d.to_others = Scalar(100) * off.colwise().sum().transpose();
  d.net = d.to_others - d.from_others;
  d.pairwise_net = Scalar(100) * (off.transpose() - off);
  d.total = d.from_others.sum() / Scalar(n);
  return d;
}

template <typename Scalar>
DirectionalSummary<Scalar> directional(const FevdMatrix<Scalar>& f) {
  return directional(f.theta_tilde);
}

} // namespace freqconn
