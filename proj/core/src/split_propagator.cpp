#include "split_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qswap::detail {

Dissipator::Dissipator(Eigen::Index dim, std::vector<std::pair<SparseMatrix, double>> jumps,
                       std::vector<std::pair<SparseMatrix, double>> dephasing)
    : dim_(dim), dephasing_(std::move(dephasing)) {
  SparseMatrix k(dim, dim);
  for (auto& [op, rate] : jumps) {
    if (rate < 0.0) throw std::invalid_argument("channel rates must be >= 0");
    if (rate == 0.0) continue;
    SparseMatrix adj = op.adjoint();
    k += rate * SparseMatrix(adj * op);
    jumps_adj_.push_back(std::move(adj));
    jumps_.emplace_back(std::move(op), rate);
  }
  std::erase_if(dephasing_, [](const auto& c) {
    if (c.second < 0.0) throw std::invalid_argument("channel rates must be >= 0");
    return c.second == 0.0;
  });
  k.prune(cplx(0.0));
  k_diag_ = RealVector::Zero(dim);
  for (Eigen::Index c = 0; c < k.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(k, c); it; ++it) {
      if (it.row() != it.col() || std::abs(it.value().imag()) > 0.0) {
        k_diagonal_ = false;
      } else {
        k_diag_(it.row()) = it.value().real();
      }
    }
  }
  if (!k_diagonal_) k_full_ = std::move(k);

  fast_ = k_diagonal_;
  for (const auto& [z, rate] : dephasing_) {
    for (Eigen::Index c = 0; c < z.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(z, c); it; ++it) {
        if (it.row() != it.col()) fast_ = false;
      }
    }
  }
  for (const auto& [op, rate] : jumps_) {
    Monomial m;
    for (Eigen::Index c = 0; c < op.outerSize(); ++c) {
      int count = 0;
      for (SparseMatrix::InnerIterator it(op, c); it; ++it) {
        if (it.value() == cplx(0.0)) continue;
        m.col.push_back(c);
        m.row.push_back(it.row());
        m.value.push_back(std::sqrt(rate) * it.value());
        ++count;
      }
      if (count > 1) fast_ = false;
    }
    monomials_.push_back(std::move(m));
  }
  if (!fast_) {
    monomials_.clear();
    return;
  }
  weights_ = DenseMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) weights_(i, j) = -0.5 * (k_diag_(i) + k_diag_(j));
  }
  for (const auto& [z, rate] : dephasing_) {
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index c = 0; c < z.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(z, c); it; ++it) d(c) = it.value();
    }
    weights_ += rate * (d * d.adjoint() - DenseMatrix::Ones(dim, dim));
  }
}

void Dissipator::apply(const DenseMatrix& rho, DenseMatrix& out) const {
  if (fast_) {
    out.noalias() = weights_.cwiseProduct(rho);
    for (const auto& m : monomials_) {
      const std::size_t nz = m.col.size();
      for (std::size_t b = 0; b < nz; ++b) {
        const cplx vb = std::conj(m.value[b]);
        const cplx* src = &rho(0, m.col[b]);
        cplx* dst = &out(0, m.row[b]);
        for (std::size_t a = 0; a < nz; ++a) dst[m.row[a]] += (m.value[a] * vb) * src[m.col[a]];
      }
    }
    return;
  }
  out.setZero(rho.rows(), rho.cols());
  for (std::size_t c = 0; c < jumps_.size(); ++c) {
    scratch_.noalias() = jumps_[c].first * rho;
    out.noalias() += jumps_[c].second * (scratch_ * jumps_adj_[c]);
  }
  if (k_diagonal_) {
    out.noalias() -= 0.5 * (k_diag_.asDiagonal() * rho);
    out.noalias() -= 0.5 * (rho * k_diag_.asDiagonal());
  } else {
    out.noalias() -= 0.5 * (k_full_ * rho);
    out.noalias() -= 0.5 * (rho * k_full_);
  }
  for (const auto& [z, rate] : dephasing_) {
    scratch_.noalias() = z * rho;
    out.noalias() += rate * (scratch_ * z);
    out.noalias() -= rate * rho;
  }
}

// ---------------------------------------------------------------------------

SplitStepPropagator::SplitStepPropagator(const RealVector& frame, const SparseMatrix& static_part,
                                         std::vector<std::size_t> block_offsets, Dissipator dissipator)
    : offsets_(std::move(block_offsets)), dissipator_(std::move(dissipator)) {
  const auto dim = static_part.rows();
  if (offsets_.size() < 2 || offsets_.front() != 0 || offsets_.back() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("block offsets must partition the basis");
  }
  DenseMatrix gen = DenseMatrix(static_part);
  gen.diagonal() += frame.cast<cplx>();
  // Blocks must be invariant: no entries outside the diagonal blocks.
  for (std::size_t b = 0; b < n_blocks(); ++b) {
    const auto off = static_cast<Eigen::Index>(offsets_[b]);
    const auto n = block_size(b);
    for (std::size_t b2 = 0; b2 < n_blocks(); ++b2) {
      if (b2 == b) continue;
      const auto off2 = static_cast<Eigen::Index>(offsets_[b2]);
      if (gen.block(off, off2, n, block_size(b2)).cwiseAbs().maxCoeff() > 0.0) {
        throw std::invalid_argument("Hamiltonian couples blocks that were declared invariant");
      }
    }
    if (n == 0) {
      energies_.emplace_back();
      vectors_.emplace_back();
      continue;
    }
    DenseMatrix hb = gen.block(off, off, n, n);
    hb = 0.5 * (hb + hb.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hb);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of a Hamiltonian block failed");
    energies_.push_back(es.eigenvalues());
    vectors_.push_back(es.eigenvectors());
  }
  active_.assign(n_blocks() * n_blocks(), 1);
}

void SplitStepPropagator::set_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step must be positive");
  if (h == h_ && !unitaries_.empty()) return;
  h_ = h;
  unitaries_.clear();
  for (std::size_t b = 0; b < n_blocks(); ++b) {
    if (block_size(b) == 0) {
      unitaries_.emplace_back();
      continue;
    }
    Eigen::VectorXcd phases(energies_[b].size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -energies_[b](i) * h);
    unitaries_.push_back(vectors_[b] * phases.asDiagonal() * vectors_[b].adjoint());
  }
}

void SplitStepPropagator::activate_blocks_from(const DenseMatrix& rho0) {
  const std::size_t nb = n_blocks();
  std::vector<int> block_of(static_cast<std::size_t>(rho0.rows()));
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t i = offsets_[b]; i < offsets_[b + 1]; ++i) block_of[i] = static_cast<int>(b);
  }
  std::set<int> shifts;  // block(col) - block(row) over channel nonzeros
  auto collect = [&](const SparseMatrix& m) {
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
        shifts.insert(block_of[static_cast<std::size_t>(it.col())] - block_of[static_cast<std::size_t>(it.row())]);
      }
    }
  };
  for (const auto& [op, rate] : dissipator_.jumps()) collect(op);
  for (const auto& [op, rate] : dissipator_.dephasing()) collect(op);

  active_.assign(nb * nb, 0);
  std::deque<std::pair<int, int>> queue;
  for (std::size_t n = 0; n < nb; ++n) {
    for (std::size_t m = 0; m < nb; ++m) {
      if (block_size(n) == 0 || block_size(m) == 0) continue;
      const auto blk = rho0.block(static_cast<Eigen::Index>(offsets_[n]), static_cast<Eigen::Index>(offsets_[m]),
                                  block_size(n), block_size(m));
      if (blk.cwiseAbs().maxCoeff() > 0.0) {
        active_[n * nb + m] = 1;
        queue.emplace_back(static_cast<int>(n), static_cast<int>(m));
      }
    }
  }
  while (!queue.empty()) {
    const auto [n, m] = queue.front();
    queue.pop_front();
    for (int s1 : shifts) {
      for (int s2 : shifts) {
        const int n2 = n - s1;
        const int m2 = m - s2;
        if (n2 < 0 || m2 < 0 || n2 >= static_cast<int>(nb) || m2 >= static_cast<int>(nb)) continue;
        auto& flag = active_[static_cast<std::size_t>(n2) * nb + static_cast<std::size_t>(m2)];
        if (!flag) {
          flag = 1;
          queue.emplace_back(n2, m2);
        }
      }
    }
  }
}

void SplitStepPropagator::apply_dissipator_exp(DenseMatrix& rho, double tau) const {
  // Taylor series of exp(tau D); tau * ||D|| is tiny for the step sizes used.
  d1_ = rho;
  const double floor = 1e-28 * rho.squaredNorm();
  for (int k = 1; k <= 6; ++k) {
    dissipator_.apply(d1_, d2_);
    d1_ = d2_ * (tau / k);
    rho += d1_;
    if (d1_.squaredNorm() <= floor) break;
  }
}

void SplitStepPropagator::step_density(DenseMatrix& rho) const {
  if (unitaries_.empty()) throw std::logic_error("set_step must be called before stepping");
  const bool dissipative = !dissipator_.empty();
  if (dissipative) apply_dissipator_exp(rho, 0.5 * h_);
  const std::size_t nb = n_blocks();
  for (std::size_t n = 0; n < nb; ++n) {
    const auto rn = static_cast<Eigen::Index>(offsets_[n]);
    const auto sn = block_size(n);
    if (sn == 0) continue;
    for (std::size_t m = 0; m < nb; ++m) {
      if (!active_[n * nb + m]) continue;
      const auto rm = static_cast<Eigen::Index>(offsets_[m]);
      const auto sm = block_size(m);
      if (sm == 0) continue;
      acc_.noalias() = unitaries_[n] * rho.block(rn, rm, sn, sm);
      rho.block(rn, rm, sn, sm).noalias() = acc_ * unitaries_[m].adjoint();
    }
  }
  if (dissipative) apply_dissipator_exp(rho, 0.5 * h_);
}

void SplitStepPropagator::step_vector(StateVector& psi) const {
  if (unitaries_.empty()) throw std::logic_error("set_step must be called before stepping");
  for (std::size_t n = 0; n < n_blocks(); ++n) {
    const auto rn = static_cast<Eigen::Index>(offsets_[n]);
    const auto sn = block_size(n);
    if (sn == 0) continue;
    StateVector seg = unitaries_[n] * psi.segment(rn, sn);
    psi.segment(rn, sn) = seg;
  }
}

}  // namespace qswap::detail
