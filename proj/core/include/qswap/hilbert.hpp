#pragma once

// Tensor-product bookkeeping for N bosonic mode pairs plus one two-level
// coupler. Slot order is (a_1..a_N, b_1..b_N, coupler); basis indices are
// row-major mixed radix over the slot dimensions with the coupler varying
// fastest. Coupler level 0 is |g>, level 1 is |e>.

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qswap/types.hpp"

namespace qswap {

class SpaceDescriptor {
 public:
  /// Throws std::invalid_argument when the layout is not
  /// (2*n_pairs bosonic modes, coupler of dimension 2).
  SpaceDescriptor(std::vector<int> mode_dims, int n_pairs);

  int n_pairs() const noexcept { return n_pairs_; }
  const std::vector<int>& mode_dims() const noexcept { return mode_dims_; }
  std::size_t total_dim() const noexcept { return total_dim_; }
  int n_slots() const noexcept { return static_cast<int>(mode_dims_.size()); }

  int mode_a(int pair) const;
  int mode_b(int pair) const;
  int coupler_slot() const noexcept { return 2 * n_pairs_; }
  bool is_bosonic(int slot) const noexcept { return slot >= 0 && slot < 2 * n_pairs_; }

  /// Per-slot occupation numbers of a basis index.
  std::vector<int> digits(std::size_t index) const;
  std::size_t index(const std::vector<int>& digits) const;
  std::size_t stride(int slot) const { return strides_.at(static_cast<std::size_t>(slot)); }

  bool operator==(const SpaceDescriptor& other) const noexcept {
    return n_pairs_ == other.n_pairs_ && mode_dims_ == other.mode_dims_;
  }

 private:
  std::vector<int> mode_dims_;
  int n_pairs_;
  std::size_t total_dim_;
  std::vector<std::size_t> strides_;
};

/// Every bosonic mode gets `fock_levels` levels; the coupler gets two.
SpaceDescriptor make_space(int n_pairs, int fock_levels);

/// Complex square matrix tied to a SpaceDescriptor.
class Operator {
 public:
  Operator(SpaceDescriptor space, SparseMatrix matrix);

  static Operator identity(const SpaceDescriptor& space);
  static Operator zero(const SpaceDescriptor& space);

  const SpaceDescriptor& space() const noexcept { return space_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  DenseMatrix dense() const { return DenseMatrix(matrix_); }
  std::size_t dim() const noexcept { return space_.total_dim(); }

  Operator dagger() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-10) const;
  /// Largest |entry|.
  double max_abs() const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
  friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  SpaceDescriptor space_;
  SparseMatrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);

/// `local` (dim x dim of `slot`) tensored with identity on every other slot.
Operator embed_local(const SpaceDescriptor& space, int slot, const DenseMatrix& local);

/// Truncated ladder operator a|n> = sqrt(n)|n-1> on a bosonic slot.
Operator mode_annihilator(const SpaceDescriptor& space, int mode_index);
Operator mode_number(const SpaceDescriptor& space, int mode_index);

/// sigma = |g><e| on the coupler.
Operator coupler_sigma(const SpaceDescriptor& space);
/// sigma_z = |e><e| - |g><g|, i.e. [sigma+, sigma].
Operator coupler_sigma_z(const SpaceDescriptor& space);
/// |e><e| (level = 1) or |g><g| (level = 0) on the coupler.
Operator coupler_projector(const SpaceDescriptor& space, int level);

/// sum_j (a_j+ a_j + b_j+ b_j) + sigma+ sigma. Diagonal in the product basis.
Operator total_excitation(const SpaceDescriptor& space);
/// Diagonal of total_excitation as integers.
std::vector<int> excitation_numbers(const SpaceDescriptor& space);

/// Pure amplitude vector or density matrix over a SpaceDescriptor.
class QuantumState {
 public:
  /// Validating constructors; throw std::invalid_argument on violations
  /// (pure: |norm - 1| > 1e-10; density: Hermiticity 1e-10, trace 1e-9,
  /// minimum eigenvalue -1e-8).
  static QuantumState pure(SpaceDescriptor space, StateVector amplitudes);
  static QuantumState density(SpaceDescriptor space, DenseMatrix rho);
  /// No invariant checks; for integrator output that carries its own diagnostics.
  static QuantumState pure_unchecked(SpaceDescriptor space, StateVector amplitudes);
  static QuantumState density_unchecked(SpaceDescriptor space, DenseMatrix rho);

  const SpaceDescriptor& space() const noexcept { return space_; }
  bool is_pure() const noexcept { return std::holds_alternative<StateVector>(payload_); }
  const StateVector& amplitudes() const;
  /// |psi><psi| for pure states.
  DenseMatrix density_matrix() const;

 private:
  QuantumState(SpaceDescriptor space, std::variant<StateVector, DenseMatrix> payload)
      : space_(std::move(space)), payload_(std::move(payload)) {}

  SpaceDescriptor space_;
  std::variant<StateVector, DenseMatrix> payload_;
};

/// <psi|op|psi> or tr(op rho). Throws std::invalid_argument on space mismatch.
cplx expectation(const Operator& op, const QuantumState& state);

/// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const DenseMatrix& rho);

/// Basis states with total excitation <= cutoff, ordered by excitation
/// sector and then by basis index. Every Hamiltonian built in this library
/// conserves the total excitation number and every collapse channel lowers
/// or preserves it, so evolution started inside the subspace never leaves it.
class ExcitationSubspace {
 public:
  ExcitationSubspace(const SpaceDescriptor& space, int cutoff);

  const SpaceDescriptor& space() const noexcept { return space_; }
  int cutoff() const noexcept { return cutoff_; }
  std::size_t dim() const noexcept { return indices_.size(); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  /// Start offset of sector n inside the subspace; size cutoff + 2.
  const std::vector<std::size_t>& sector_offsets() const noexcept { return offsets_; }
  int sector_of(std::size_t local) const;

  SparseMatrix restrict_operator(const Operator& op) const;
  StateVector restrict_vector(const StateVector& v) const;
  DenseMatrix restrict_density(const DenseMatrix& rho) const;
  StateVector lift_vector(const StateVector& v) const;
  DenseMatrix lift_density(const DenseMatrix& rho) const;

  /// Max excitation found in the support of a state (|amplitude| > tol).
  static int max_excitation(const SpaceDescriptor& space, const StateVector& v, double tol = 0.0);
  static int max_excitation(const SpaceDescriptor& space, const DenseMatrix& rho, double tol = 0.0);

 private:
  SpaceDescriptor space_;
  int cutoff_;
  std::vector<std::size_t> indices_;
  std::vector<std::size_t> offsets_;
  std::vector<long> local_of_;  // full index -> local index or -1
};

}  // namespace qswap
