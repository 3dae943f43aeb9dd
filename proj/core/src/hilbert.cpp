#include "qswap/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

namespace qswap {

SpaceDescriptor::SpaceDescriptor(std::vector<int> mode_dims, int n_pairs)
    : mode_dims_(std::move(mode_dims)), n_pairs_(n_pairs), total_dim_(1) {
  if (n_pairs_ < 1) throw std::invalid_argument("n_pairs must be >= 1");
  if (mode_dims_.size() != static_cast<std::size_t>(2 * n_pairs_ + 1)) {
    throw std::invalid_argument("mode_dims must hold 2*n_pairs + 1 entries");
  }
  if (mode_dims_.back() != 2) throw std::invalid_argument("coupler dimension must be exactly 2");
  for (int d : mode_dims_) {
    if (d < 2) throw std::invalid_argument("every slot needs at least two levels");
  }
  strides_.assign(mode_dims_.size(), 1);
  for (int s = static_cast<int>(mode_dims_.size()) - 1; s >= 0; --s) {
    strides_[static_cast<std::size_t>(s)] = total_dim_;
    total_dim_ *= static_cast<std::size_t>(mode_dims_[static_cast<std::size_t>(s)]);
  }
}

int SpaceDescriptor::mode_a(int pair) const {
  if (pair < 0 || pair >= n_pairs_) throw std::out_of_range("pair index out of range");
  return pair;
}

int SpaceDescriptor::mode_b(int pair) const {
  if (pair < 0 || pair >= n_pairs_) throw std::out_of_range("pair index out of range");
  return n_pairs_ + pair;
}

std::vector<int> SpaceDescriptor::digits(std::size_t index) const {
  if (index >= total_dim_) throw std::out_of_range("basis index out of range");
  std::vector<int> out(mode_dims_.size());
  for (std::size_t s = 0; s < mode_dims_.size(); ++s) {
    out[s] = static_cast<int>(index / strides_[s]);
    index %= strides_[s];
  }
  return out;
}

std::size_t SpaceDescriptor::index(const std::vector<int>& digits) const {
  if (digits.size() != mode_dims_.size()) throw std::invalid_argument("digit count mismatch");
  std::size_t idx = 0;
  for (std::size_t s = 0; s < digits.size(); ++s) {
    if (digits[s] < 0 || digits[s] >= mode_dims_[s]) {
      throw std::out_of_range("occupation exceeds slot dimension");
    }
    idx += static_cast<std::size_t>(digits[s]) * strides_[s];
  }
  return idx;
}

SpaceDescriptor make_space(int n_pairs, int fock_levels) {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  if (fock_levels < 2) throw std::invalid_argument("fock_levels must be >= 2 to hold |0> and |1>");
  std::vector<int> dims(static_cast<std::size_t>(2 * n_pairs), fock_levels);
  dims.push_back(2);
  return SpaceDescriptor(std::move(dims), n_pairs);
}

// ---------------------------------------------------------------------------

Operator::Operator(SpaceDescriptor space, SparseMatrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw std::invalid_argument("operator dimension does not match its space");
  }
  matrix_.makeCompressed();
}

Operator Operator::identity(const SpaceDescriptor& space) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  SparseMatrix m(n, n);
  m.setIdentity();
  return Operator(space, std::move(m));
}

Operator Operator::zero(const SpaceDescriptor& space) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  return Operator(space, SparseMatrix(n, n));
}

Operator Operator::dagger() const {
  SparseMatrix adj = matrix_.adjoint();
  return Operator(space_, std::move(adj));
}

double Operator::max_abs() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

bool Operator::is_hermitian(double tol) const {
  SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  double scale = std::max(1.0, max_abs());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst <= tol * scale;
}

bool Operator::is_unitary(double tol) const {
  DenseMatrix d = dense();
  DenseMatrix prod = d.adjoint() * d;
  prod -= DenseMatrix::Identity(d.rows(), d.cols());
  return prod.cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& rhs) {
  if (!(space_ == rhs.space_)) throw std::invalid_argument("operator space mismatch");
  matrix_ += rhs.matrix_;
  matrix_.prune(cplx(0.0));
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  if (!(space_ == rhs.space_)) throw std::invalid_argument("operator space mismatch");
  matrix_ -= rhs.matrix_;
  matrix_.prune(cplx(0.0));
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  matrix_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  if (!(lhs.space_ == rhs.space_)) throw std::invalid_argument("operator space mismatch");
  SparseMatrix prod = lhs.matrix_ * rhs.matrix_;
  return Operator(lhs.space_, std::move(prod));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator embed_local(const SpaceDescriptor& space, int slot, const DenseMatrix& local) {
  if (slot < 0 || slot >= space.n_slots()) throw std::out_of_range("slot index out of range");
  const int ld = space.mode_dims()[static_cast<std::size_t>(slot)];
  if (local.rows() != ld || local.cols() != ld) {
    throw std::invalid_argument("local operator dimension does not match slot");
  }
  const std::size_t stride = space.stride(slot);
  const std::size_t n = space.total_dim();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t col = 0; col < n; ++col) {
    const int occ = static_cast<int>((col / stride) % static_cast<std::size_t>(ld));
    const std::size_t base = col - static_cast<std::size_t>(occ) * stride;
    for (int r = 0; r < ld; ++r) {
      const cplx v = local(r, occ);
      if (v != cplx(0.0)) {
        trips.emplace_back(static_cast<int>(base + static_cast<std::size_t>(r) * stride),
                           static_cast<int>(col), v);
      }
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(trips.begin(), trips.end());
  return Operator(space, std::move(m));
}

Operator mode_annihilator(const SpaceDescriptor& space, int mode_index) {
  if (!space.is_bosonic(mode_index)) throw std::out_of_range("mode index does not address a bosonic mode");
  const int d = space.mode_dims()[static_cast<std::size_t>(mode_index)];
  DenseMatrix a = DenseMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed_local(space, mode_index, a);
}

Operator mode_number(const SpaceDescriptor& space, int mode_index) {
  if (!space.is_bosonic(mode_index)) throw std::out_of_range("mode index does not address a bosonic mode");
  const int d = space.mode_dims()[static_cast<std::size_t>(mode_index)];
  DenseMatrix n = DenseMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return embed_local(space, mode_index, n);
}

Operator coupler_sigma(const SpaceDescriptor& space) {
  DenseMatrix s = DenseMatrix::Zero(2, 2);
  s(0, 1) = 1.0;  // |g><e|
  return embed_local(space, space.coupler_slot(), s);
}

Operator coupler_sigma_z(const SpaceDescriptor& space) {
  DenseMatrix z = DenseMatrix::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  return embed_local(space, space.coupler_slot(), z);
}

Operator coupler_projector(const SpaceDescriptor& space, int level) {
  if (level != 0 && level != 1) throw std::out_of_range("coupler level must be 0 (g) or 1 (e)");
  DenseMatrix p = DenseMatrix::Zero(2, 2);
  p(level, level) = 1.0;
  return embed_local(space, space.coupler_slot(), p);
}

std::vector<int> excitation_numbers(const SpaceDescriptor& space) {
  std::vector<int> out(space.total_dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto d = space.digits(i);
    int s = 0;
    for (int v : d) s += v;
    out[i] = s;
  }
  return out;
}

Operator total_excitation(const SpaceDescriptor& space) {
  const auto n = excitation_numbers(space);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] != 0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), static_cast<double>(n[i]));
  }
  const auto dim = static_cast<Eigen::Index>(space.total_dim());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return Operator(space, std::move(m));
}

// ---------------------------------------------------------------------------

double min_eigenvalue(const DenseMatrix& rho) {
  DenseMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

QuantumState QuantumState::pure(SpaceDescriptor space, StateVector amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != space.total_dim()) {
    throw std::invalid_argument("amplitude vector length does not match space");
  }
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) throw std::invalid_argument("pure state is not normalized");
  return QuantumState(std::move(space), std::move(amplitudes));
}

QuantumState QuantumState::density(SpaceDescriptor space, DenseMatrix rho) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  if (rho.rows() != n || rho.cols() != n) throw std::invalid_argument("density matrix dimension mismatch");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-9) throw std::invalid_argument("density matrix trace is not 1");
  if (min_eigenvalue(rho) < -1e-8) throw std::invalid_argument("density matrix has a negative eigenvalue");
  return QuantumState(std::move(space), std::move(rho));
}

QuantumState QuantumState::pure_unchecked(SpaceDescriptor space, StateVector amplitudes) {
  return QuantumState(std::move(space), std::move(amplitudes));
}

QuantumState QuantumState::density_unchecked(SpaceDescriptor space, DenseMatrix rho) {
  return QuantumState(std::move(space), std::move(rho));
}

const StateVector& QuantumState::amplitudes() const {
  if (!is_pure()) throw std::logic_error("state is a density matrix, not a pure state");
  return std::get<StateVector>(payload_);
}

DenseMatrix QuantumState::density_matrix() const {
  if (is_pure()) {
    const auto& v = std::get<StateVector>(payload_);
    return v * v.adjoint();
  }
  return std::get<DenseMatrix>(payload_);
}

cplx expectation(const Operator& op, const QuantumState& state) {
  if (!(op.space() == state.space())) throw std::invalid_argument("operator and state live on different spaces");
  if (state.is_pure()) {
    const auto& v = state.amplitudes();
    StateVector ov = op.matrix() * v;
    return v.dot(ov);
  }
  DenseMatrix prod = op.matrix() * state.density_matrix();
  return prod.trace();
}

// ---------------------------------------------------------------------------

ExcitationSubspace::ExcitationSubspace(const SpaceDescriptor& space, int cutoff)
    : space_(space), cutoff_(cutoff) {
  if (cutoff < 0) throw std::invalid_argument("excitation cutoff must be >= 0");
  const auto exc = excitation_numbers(space);
  offsets_.assign(static_cast<std::size_t>(cutoff) + 2, 0);
  std::vector<std::vector<std::size_t>> sectors(static_cast<std::size_t>(cutoff) + 1);
  for (std::size_t i = 0; i < exc.size(); ++i) {
    if (exc[i] <= cutoff) sectors[static_cast<std::size_t>(exc[i])].push_back(i);
  }
  local_of_.assign(space.total_dim(), -1);
  for (std::size_t n = 0; n < sectors.size(); ++n) {
    offsets_[n] = indices_.size();
    for (std::size_t i : sectors[n]) {
      local_of_[i] = static_cast<long>(indices_.size());
      indices_.push_back(i);
    }
  }
  offsets_.back() = indices_.size();
}

int ExcitationSubspace::sector_of(std::size_t local) const {
  for (std::size_t n = 0; n + 1 < offsets_.size(); ++n) {
    if (local < offsets_[n + 1]) return static_cast<int>(n);
  }
  throw std::out_of_range("local index outside subspace");
}

SparseMatrix ExcitationSubspace::restrict_operator(const Operator& op) const {
  if (!(op.space() == space_)) throw std::invalid_argument("operator space mismatch");
  std::vector<Eigen::Triplet<cplx>> trips;
  const auto& m = op.matrix();
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const long r = local_of_[static_cast<std::size_t>(it.row())];
      const long c = local_of_[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) trips.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
    }
  }
  const auto d = static_cast<Eigen::Index>(dim());
  SparseMatrix out(d, d);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

StateVector ExcitationSubspace::restrict_vector(const StateVector& v) const {
  StateVector out(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(indices_[i]));
  }
  return out;
}

DenseMatrix ExcitationSubspace::restrict_density(const DenseMatrix& rho) const {
  const auto d = static_cast<Eigen::Index>(dim());
  DenseMatrix out(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      out(r, c) = rho(static_cast<Eigen::Index>(indices_[static_cast<std::size_t>(r)]),
                      static_cast<Eigen::Index>(indices_[static_cast<std::size_t>(c)]));
    }
  }
  return out;
}

StateVector ExcitationSubspace::lift_vector(const StateVector& v) const {
  StateVector out = StateVector::Zero(static_cast<Eigen::Index>(space_.total_dim()));
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    out(static_cast<Eigen::Index>(indices_[i])) = v(static_cast<Eigen::Index>(i));
  }
  return out;
}

DenseMatrix ExcitationSubspace::lift_density(const DenseMatrix& rho) const {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  DenseMatrix out = DenseMatrix::Zero(n, n);
  const auto d = static_cast<Eigen::Index>(dim());
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      out(static_cast<Eigen::Index>(indices_[static_cast<std::size_t>(r)]),
          static_cast<Eigen::Index>(indices_[static_cast<std::size_t>(c)])) = rho(r, c);
    }
  }
  return out;
}

int ExcitationSubspace::max_excitation(const SpaceDescriptor& space, const StateVector& v, double tol) {
  const auto exc = excitation_numbers(space);
  int m = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) m = std::max(m, exc[static_cast<std::size_t>(i)]);
  }
  return m;
}

int ExcitationSubspace::max_excitation(const SpaceDescriptor& space, const DenseMatrix& rho, double tol) {
  const auto exc = excitation_numbers(space);
  int m = 0;
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
      if (std::abs(rho(r, c)) > tol) {
        m = std::max({m, exc[static_cast<std::size_t>(r)], exc[static_cast<std::size_t>(c)]});
      }
    }
  }
  return m;
}

}  // namespace qswap
