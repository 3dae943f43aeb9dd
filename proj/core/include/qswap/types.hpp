#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qswap {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

/// Invalid configuration or user input. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator failure, NaN, or a violated conservation bound. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qswap
