#include "qswap/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qswap {

TimeDependentHamiltonian TimeDependentHamiltonian::constant(Operator h) {
  TimeDependentHamiltonian out(h.space());
  out.frame_ = RealVector::Zero(static_cast<Eigen::Index>(h.dim()));
  out.static_part_ = std::move(h);
  return out;
}

TimeDependentHamiltonian TimeDependentHamiltonian::rotating(RealVector frame_energies, Operator static_part) {
  if (static_cast<std::size_t>(frame_energies.size()) != static_part.dim()) {
    throw std::invalid_argument("frame energy vector length does not match operator dimension");
  }
  TimeDependentHamiltonian out(static_part.space());
  out.frame_ = std::move(frame_energies);
  out.static_part_ = std::move(static_part);
  return out;
}

TimeDependentHamiltonian TimeDependentHamiltonian::from_function(SpaceDescriptor space,
                                                                 std::function<Operator(double)> fn) {
  if (!fn) throw std::invalid_argument("empty Hamiltonian callable");
  TimeDependentHamiltonian out(std::move(space));
  out.fn_ = std::move(fn);
  return out;
}

const RealVector& TimeDependentHamiltonian::frame_energies() const {
  if (!static_part_) throw std::logic_error("Hamiltonian has no rotating form");
  return frame_;
}

const Operator& TimeDependentHamiltonian::static_part() const {
  if (!static_part_) throw std::logic_error("Hamiltonian has no rotating form");
  return *static_part_;
}

void TimeDependentHamiltonian::at_into(double t, SparseMatrix& out) const {
  if (!static_part_) {
    Operator h = fn_(t);
    if (!(h.space() == space_)) throw std::invalid_argument("Hamiltonian callable returned a foreign space");
    out = h.matrix();
    return;
  }
  const SparseMatrix& s = static_part_->matrix();
  const bool same_pattern =
      out.rows() == s.rows() && out.cols() == s.cols() && out.isCompressed() && out.nonZeros() == s.nonZeros() &&
      std::equal(s.outerIndexPtr(), s.outerIndexPtr() + s.outerSize() + 1, out.outerIndexPtr()) &&
      std::equal(s.innerIndexPtr(), s.innerIndexPtr() + s.nonZeros(), out.innerIndexPtr());
  if (!same_pattern) out = s;
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    SparseMatrix::InnerIterator src(s, k);
    SparseMatrix::InnerIterator dst(out, k);
    for (; src; ++src, ++dst) {
      const double w = frame_(src.row()) - frame_(src.col());
      dst.valueRef() = w == 0.0 ? src.value() : src.value() * std::polar(1.0, w * t);
    }
  }
}

Operator TimeDependentHamiltonian::at(double t) const {
  if (!static_part_) return fn_(t);
  SparseMatrix m;
  at_into(t, m);
  return Operator(space_, std::move(m));
}

}  // namespace qswap
