#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqconn {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Matrix = Mat<double>;
using Vector = Vec<double>;
using ComplexMatrix = CMat<double>;

/// Bad input: malformed files, violated preconditions, invalid configuration.
/// The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: singular designs, nonstationary fits, degenerate variances.
/// The CLI maps this family to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class LoadError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class BoundsError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class EmptyBandError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class EstimationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DegenerateVarianceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

inline constexpr double kPi = 3.14159265358979323846;

} // namespace freqconn
