#pragma once

// Internal propagation kernels shared by the integrators in dynamics.cpp.

#include <cstddef>
#include <utility>
#include <vector>

#include "qswap/types.hpp"

namespace qswap::detail {

/// Lindblad dissipator
///   D(rho) = sum_c r_c (L_c rho L_c+ - {L_c+ L_c, rho}/2) + sum_z r_z (Z rho Z - rho)
/// on a (possibly restricted) basis.
class Dissipator {
 public:
  Dissipator() = default;
  Dissipator(Eigen::Index dim, std::vector<std::pair<SparseMatrix, double>> jumps,
             std::vector<std::pair<SparseMatrix, double>> dephasing);

  bool empty() const noexcept { return jumps_.empty() && dephasing_.empty(); }
  /// out = D(rho)
  void apply(const DenseMatrix& rho, DenseMatrix& out) const;
  /// Block-index shifts (column sector minus row sector) produced by the
  /// channel operators, used to find which density blocks can be populated.
  const std::vector<std::pair<SparseMatrix, double>>& jumps() const noexcept { return jumps_; }
  const std::vector<std::pair<SparseMatrix, double>>& dephasing() const noexcept { return dephasing_; }

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::pair<SparseMatrix, double>> jumps_;
  std::vector<SparseMatrix> jumps_adj_;
  std::vector<std::pair<SparseMatrix, double>> dephasing_;
  bool k_diagonal_ = true;
  RealVector k_diag_;
  SparseMatrix k_full_;
  mutable DenseMatrix scratch_;

  // Fast path when every jump has at most one entry per column and the
  // dephasing operators are diagonal: D(rho) = W o rho + sum_c scatter_c(rho).
  struct Monomial {
    std::vector<Eigen::Index> col;  // nonzero columns
    std::vector<Eigen::Index> row;  // their single row
    std::vector<cplx> value;        // sqrt(rate) folded in
  };
  bool fast_ = false;
  std::vector<Monomial> monomials_;
  DenseMatrix weights_;
};

/// Strang splitting exp(D h/2) exp(G h) exp(D h/2) for the constant
/// rotating-frame generator G = -i[R + S, .]. exp(-i(R + S)h) is built from
/// a Hermitian eigendecomposition of every diagonal block of R + S, so the
/// coherent part is exact; only the splitting couples D and S.
class SplitStepPropagator {
 public:
  /// `block_offsets` partitions the basis into invariant blocks of R + S
  /// (size n_blocks + 1). A single block is always valid.
  SplitStepPropagator(const RealVector& frame, const SparseMatrix& static_part, std::vector<std::size_t> block_offsets,
                      Dissipator dissipator);

  void set_step(double h);
  double step() const noexcept { return h_; }

  /// Limits the conjugation to density blocks reachable from rho0.
  void activate_blocks_from(const DenseMatrix& rho0);

  void step_density(DenseMatrix& rho) const;
  void step_vector(StateVector& psi) const;

 private:
  void apply_dissipator_exp(DenseMatrix& rho, double tau) const;
  std::size_t n_blocks() const { return offsets_.size() - 1; }
  Eigen::Index block_size(std::size_t b) const {
    return static_cast<Eigen::Index>(offsets_[b + 1] - offsets_[b]);
  }

  std::vector<std::size_t> offsets_;
  std::vector<RealVector> energies_;
  std::vector<DenseMatrix> vectors_;
  std::vector<DenseMatrix> unitaries_;
  std::vector<char> active_;  // n_blocks x n_blocks
  Dissipator dissipator_;
  double h_ = 0.0;
  mutable DenseMatrix d1_, d2_, acc_;
};

}  // namespace qswap::detail
