#pragma once

#include <functional>
#include <optional>

#include "qswap/hilbert.hpp"

namespace qswap {

/// Time-parameterized Hamiltonian source.
///
/// Two representations are supported. A plain callable t -> H(t) works with
/// any integrator. The rotating form H(t) = exp(iRt) S exp(-iRt), with R
/// diagonal in the product basis and S static, additionally lets the
/// split-step propagator advance the coherent part exactly: in the frame
/// rotating with R the generator is the constant R + S.
class TimeDependentHamiltonian {
 public:
  static TimeDependentHamiltonian constant(Operator h);
  static TimeDependentHamiltonian rotating(RealVector frame_energies, Operator static_part);
  static TimeDependentHamiltonian from_function(SpaceDescriptor space, std::function<Operator(double)> fn);

  const SpaceDescriptor& space() const noexcept { return space_; }
  Operator at(double t) const;
  /// Writes H(t) into `out` reusing its sparsity pattern when possible.
  void at_into(double t, SparseMatrix& out) const;

  bool has_rotating_form() const noexcept { return static_part_.has_value(); }
  /// Diagonal R; zero vector for constant Hamiltonians.
  const RealVector& frame_energies() const;
  const Operator& static_part() const;

 private:
  explicit TimeDependentHamiltonian(SpaceDescriptor space) : space_(std::move(space)) {}

  SpaceDescriptor space_;
  RealVector frame_;
  std::optional<Operator> static_part_;
  std::function<Operator(double)> fn_;
};

}  // namespace qswap
