#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qswap/model.hpp"

namespace qswap::testing {

inline constexpr double kG = kTwoPi * 100e6;  // 100 MHz coupling

inline double ghz(double f) { return kTwoPi * f * 1e9; }
inline double mhz(double f) { return kTwoPi * f * 1e6; }

/// Two pairs with g = mu = 100 MHz, Delta_1 = alpha g, Delta_2 = -alpha g,
/// Table 1 lifetimes when `lossy`.
inline DeviceParams two_pair_device(double alpha, bool lossy) {
  DeviceParams p;
  p.omega_c = ghz(6.0);
  const double d = alpha * kG;
  p.omega_a = {p.omega_c - d, p.omega_c + d};
  p.omega_b = p.omega_a;
  p.g = {kG, kG};
  p.mu = {kG, kG};
  const double kappa = lossy ? 1e6 : 0.0;
  p.kappa_a = {kappa, kappa};
  p.kappa_b = {kappa, kappa};
  p.gamma = lossy ? 1.0 / 3e-6 : 0.0;
  p.gamma_phi = lossy ? 1.0 / 3e-6 : 0.0;
  return p;
}

inline DeviceParams one_pair_device(double alpha, bool lossy) {
  DeviceParams p;
  p.omega_c = ghz(6.0);
  p.omega_a = {p.omega_c - alpha * kG};
  p.omega_b = p.omega_a;
  p.g = {kG};
  p.mu = {kG};
  const double kappa = lossy ? 1e6 : 0.0;
  p.kappa_a = {kappa};
  p.kappa_b = {kappa};
  p.gamma = lossy ? 1.0 / 3e-6 : 0.0;
  p.gamma_phi = lossy ? 1.0 / 3e-6 : 0.0;
  return p;
}

/// Truncated annihilator written out directly.
inline Eigen::MatrixXcd ladder(int n) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// Kronecker product of per-slot matrices, first slot most significant.
inline Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& factors) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& f : factors) {
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(out, f).eval();
    out = next;
  }
  return out;
}

/// Column-stacked Liouvillian of -i[H, .] + sum r (L . L+ - {L+L, .}/2) + sum z (Z . Z - .).
inline Eigen::MatrixXcd liouvillian(const Eigen::MatrixXcd& h,
                                    const std::vector<std::pair<Eigen::MatrixXcd, double>>& jumps,
                                    const std::vector<std::pair<Eigen::MatrixXcd, double>>& dephasing) {
  const auto d = h.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const std::complex<double> mi(0.0, -1.0);
  Eigen::MatrixXcd l = mi * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (const auto& [op, r] : jumps) {
    const Eigen::MatrixXcd k = op.adjoint() * op;
    l += r * (Eigen::kroneckerProduct(op.conjugate(), op).eval() - 0.5 * Eigen::kroneckerProduct(id, k).eval() -
              0.5 * Eigen::kroneckerProduct(k.transpose(), id).eval());
  }
  for (const auto& [z, r] : dephasing) {
    l += r * (Eigen::kroneckerProduct(z.conjugate(), z).eval() - Eigen::kroneckerProduct(id, id).eval());
  }
  return l;
}

inline Eigen::MatrixXcd apply_superop(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& rho) {
  const auto d = rho.rows();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  Eigen::VectorXcd w = s * v;
  return Eigen::Map<Eigen::MatrixXcd>(w.data(), d, d);
}

}  // namespace qswap::testing
