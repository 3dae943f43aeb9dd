#include <gtest/gtest.h>

#include "qswap/hilbert.hpp"
#include "support.hpp"

using namespace qswap;
using qswap::testing::kron_all;
using qswap::testing::ladder;

namespace {

double max_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<Eigen::MatrixXcd> identities(const SpaceDescriptor& s) {
  std::vector<Eigen::MatrixXcd> out;
  for (int d : s.mode_dims()) out.push_back(Eigen::MatrixXcd::Identity(d, d));
  return out;
}

}  // namespace

TEST(Space, DimensionArithmetic) {
  EXPECT_EQ(make_space(2, 3).total_dim(), 162u);
  EXPECT_EQ(make_space(1, 2).total_dim(), 8u);
  const auto s = make_space(3, 4);
  EXPECT_EQ(s.n_slots(), 7);
  EXPECT_EQ(s.mode_dims().back(), 2);
  EXPECT_EQ(s.coupler_slot(), 6);
  EXPECT_EQ(s.mode_a(2), 2);
  EXPECT_EQ(s.mode_b(0), 3);
}

TEST(Space, RejectsBadArguments) {
  EXPECT_THROW(make_space(0, 3), std::invalid_argument);
  EXPECT_THROW(make_space(2, 1), std::invalid_argument);
  EXPECT_THROW(make_space(-1, 3), std::invalid_argument);
  EXPECT_THROW(make_space(2, 3).mode_a(2), std::out_of_range);
}

TEST(Space, CouplerIsFastestDigit) {
  const auto s = make_space(2, 3);
  EXPECT_EQ(s.index({0, 0, 0, 0, 1}), 1u);
  EXPECT_EQ(s.index({0, 0, 0, 1, 0}), 2u);
  EXPECT_EQ(s.index({1, 0, 0, 0, 0}), 54u);
  for (std::size_t i = 0; i < s.total_dim(); ++i) EXPECT_EQ(s.index(s.digits(i)), i);
}

TEST(Operators, LadderMatchesKroneckerConstruction) {
  const auto s = make_space(2, 3);
  for (int slot = 0; slot < 4; ++slot) {
    auto f = identities(s);
    f[static_cast<std::size_t>(slot)] = ladder(3);
    EXPECT_EQ(max_diff(mode_annihilator(s, slot).dense(), kron_all(f)), 0.0) << "slot " << slot;
  }
  EXPECT_THROW(mode_annihilator(s, 4), std::out_of_range);
  EXPECT_THROW(mode_annihilator(s, -1), std::out_of_range);
}

TEST(Operators, SingleModeLadderEntries) {
  const auto a = ladder(3);
  EXPECT_DOUBLE_EQ(a(0, 1).real(), 1.0);
  EXPECT_DOUBLE_EQ(a(1, 2).real(), std::sqrt(2.0));
  const auto s = make_space(1, 3);
  const auto m = mode_annihilator(s, 0).dense();
  // |1,0,g> -> |0,0,g> and |2,0,g> -> sqrt(2)|1,0,g>
  EXPECT_DOUBLE_EQ(m(static_cast<Eigen::Index>(s.index({0, 0, 0})), static_cast<Eigen::Index>(s.index({1, 0, 0}))).real(), 1.0);
  EXPECT_DOUBLE_EQ(m(static_cast<Eigen::Index>(s.index({1, 0, 0})), static_cast<Eigen::Index>(s.index({2, 0, 0}))).real(),
                   std::sqrt(2.0));
}

TEST(Operators, AnnihilatorKillsVacuum) {
  const auto s = make_space(2, 3);
  StateVector vac = StateVector::Zero(static_cast<Eigen::Index>(s.total_dim()));
  vac(0) = 1.0;
  for (int slot = 0; slot < 4; ++slot) {
    EXPECT_EQ((mode_annihilator(s, slot).matrix() * vac).norm(), 0.0);
  }
}

TEST(Operators, CanonicalCommutatorBelowTopLevel) {
  const auto s = make_space(1, 4);
  const auto a = mode_annihilator(s, 0);
  const DenseMatrix c = commutator(a, a.dagger()).dense();
  for (std::size_t i = 0; i < s.total_dim(); ++i) {
    const auto d = s.digits(i);
    const auto ii = static_cast<Eigen::Index>(i);
    const double expected = d[0] < 3 ? 1.0 : -3.0;  // top level: -(n_max)
    EXPECT_NEAR(c(ii, ii).real(), expected, 1e-14);
  }
  DenseMatrix off = c;
  off.diagonal().setZero();
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Operators, CouplerAlgebra) {
  const auto s = make_space(1, 2);
  const auto sm = coupler_sigma(s);
  const auto sp = sm.dagger();
  EXPECT_EQ(max_diff(commutator(sp, sm).dense(), coupler_sigma_z(s).dense()), 0.0);
  EXPECT_EQ((sm * sm).max_abs(), 0.0);
  // sigma |e> = |g>, sigma |g> = 0 on the vacuum of the modes
  StateVector e = StateVector::Zero(8);
  e(static_cast<Eigen::Index>(s.index({0, 0, 1}))) = 1.0;
  StateVector out = sm.matrix() * e;
  EXPECT_EQ(out(static_cast<Eigen::Index>(s.index({0, 0, 0}))), cplx(1.0));
  EXPECT_DOUBLE_EQ(out.norm(), 1.0);
  StateVector g = StateVector::Zero(8);
  g(0) = 1.0;
  EXPECT_EQ((sm.matrix() * g).norm(), 0.0);
  auto f = identities(s);
  Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(2, 2);
  local(0, 1) = 1.0;
  f.back() = local;
  EXPECT_EQ(max_diff(sm.dense(), kron_all(f)), 0.0);
}

TEST(Operators, DifferentSlotsCommute) {
  for (int fock : {2, 3}) {
    for (int n : {1, 2}) {
      const auto s = make_space(n, fock);
      std::vector<Operator> ops;
      for (int slot = 0; slot < 2 * n; ++slot) {
        ops.push_back(mode_annihilator(s, slot));
        ops.push_back(mode_annihilator(s, slot).dagger());
      }
      ops.push_back(coupler_sigma(s));
      ops.push_back(coupler_sigma(s).dagger());
      auto slot_of = [&](std::size_t k) { return k < static_cast<std::size_t>(4 * n) ? static_cast<int>(k / 2) : -1; };
      for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = 0; j < ops.size(); ++j) {
          if (slot_of(i) == slot_of(j)) continue;
          EXPECT_EQ(commutator(ops[i], ops[j]).max_abs(), 0.0) << i << "," << j;
        }
      }
    }
  }
}

TEST(Operators, DaggerIsInvolution) {
  const auto s = make_space(2, 3);
  Operator a = mode_annihilator(s, 1) * mode_annihilator(s, 2).dagger() * cplx(0.3, -1.7) + coupler_sigma(s);
  EXPECT_EQ(max_diff(a.dagger().dagger().dense(), a.dense()), 0.0);
}

TEST(Operators, TotalExcitationDiagonalHermitian) {
  const auto s = make_space(2, 3);
  const auto n = total_excitation(s);
  EXPECT_TRUE(n.is_hermitian());
  DenseMatrix d = n.dense();
  const auto nums = excitation_numbers(s);
  for (std::size_t i = 0; i < s.total_dim(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto digits = s.digits(i);
    int sum = 0;
    for (int x : digits) sum += x;
    EXPECT_EQ(d(ii, ii).real(), sum);
    EXPECT_EQ(nums[i], sum);
    d(ii, ii) = 0.0;
  }
  EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Operators, PredicatesAndMismatch) {
  const auto s = make_space(1, 3);
  EXPECT_TRUE(Operator::identity(s).is_unitary());
  EXPECT_FALSE(mode_annihilator(s, 0).is_hermitian());
  EXPECT_FALSE(mode_annihilator(s, 0).is_unitary());
  const auto other = make_space(1, 2);
  EXPECT_THROW(mode_annihilator(s, 0) * mode_annihilator(other, 0), std::invalid_argument);
  EXPECT_THROW(mode_annihilator(s, 0) + mode_annihilator(other, 0), std::invalid_argument);
}

TEST(States, Validation) {
  const auto s = make_space(1, 2);
  StateVector v = StateVector::Zero(8);
  v(0) = 1.0;
  EXPECT_NO_THROW(QuantumState::pure(s, v));
  v(1) = 1e-4;
  EXPECT_THROW(QuantumState::pure(s, v), std::invalid_argument);
  EXPECT_THROW(QuantumState::pure(s, StateVector::Zero(4)), std::invalid_argument);

  DenseMatrix rho = DenseMatrix::Zero(8, 8);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  EXPECT_NO_THROW(QuantumState::density(s, rho));
  DenseMatrix bad = rho;
  bad(0, 1) = cplx(0.0, 0.1);
  EXPECT_THROW(QuantumState::density(s, bad), std::invalid_argument);  // not Hermitian
  bad = rho;
  bad(0, 0) = 0.6;
  EXPECT_THROW(QuantumState::density(s, bad), std::invalid_argument);  // trace
  bad = rho;
  bad(0, 0) = 1.1;
  bad(1, 1) = -0.1;
  EXPECT_THROW(QuantumState::density(s, bad), std::invalid_argument);  // negative eigenvalue
}

TEST(States, Expectation) {
  const auto s = make_space(1, 3);
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(s.total_dim()));
  v(static_cast<Eigen::Index>(s.index({1, 0, 0}))) = 1.0;
  const auto psi = QuantumState::pure(s, v);
  EXPECT_NEAR(expectation(mode_number(s, 0), psi).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(expectation(coupler_projector(s, 1), psi)), 0.0, 1e-15);
  DenseMatrix rho = DenseMatrix::Zero(18, 18);
  for (int i = 0; i < 18; ++i) rho(i, i) = 1.0 / 18.0;
  const auto mixed = QuantumState::density(s, rho);
  EXPECT_NEAR(expectation(Operator::identity(s), mixed).real(), 1.0, 1e-9);
  EXPECT_THROW(expectation(Operator::identity(make_space(1, 2)), mixed), std::invalid_argument);
}

TEST(Subspace, SectorSizesMatchBruteForce) {
  for (int fock : {3, 4}) {
    const auto s = make_space(2, fock);
    for (int cutoff : {2, 3, 4}) {
      std::vector<std::size_t> count(static_cast<std::size_t>(cutoff + 1), 0);
      for (std::size_t i = 0; i < s.total_dim(); ++i) {
        int sum = 0;
        for (int x : s.digits(i)) sum += x;
        if (sum <= cutoff) ++count[static_cast<std::size_t>(sum)];
      }
      const ExcitationSubspace sub(s, cutoff);
      std::size_t total = 0;
      for (int n = 0; n <= cutoff; ++n) {
        const auto ns = static_cast<std::size_t>(n);
        EXPECT_EQ(sub.sector_offsets()[ns + 1] - sub.sector_offsets()[ns], count[ns]);
        total += count[ns];
      }
      EXPECT_EQ(sub.dim(), total);
    }
  }
  EXPECT_EQ(ExcitationSubspace(make_space(2, 3), 4).dim(), 81u);
  EXPECT_EQ(ExcitationSubspace(make_space(2, 4), 4).dim(), 101u);
}

TEST(Subspace, RestrictLiftRoundTrip) {
  const auto s = make_space(2, 3);
  const ExcitationSubspace sub(s, 2);
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(s.total_dim()));
  v(static_cast<Eigen::Index>(s.index({1, 0, 0, 1, 0}))) = cplx(0.6, 0.0);
  v(static_cast<Eigen::Index>(s.index({0, 1, 0, 0, 1}))) = cplx(0.0, 0.8);
  EXPECT_EQ(ExcitationSubspace::max_excitation(s, v), 2);
  EXPECT_EQ((sub.lift_vector(sub.restrict_vector(v)) - v).norm(), 0.0);
  const DenseMatrix rho = v * v.adjoint();
  EXPECT_EQ(max_diff(sub.lift_density(sub.restrict_density(rho)), rho), 0.0);
  // A conserving operator restricted then applied equals apply-then-restrict.
  const auto op = mode_annihilator(s, 0) * mode_annihilator(s, 2).dagger() + coupler_sigma(s).dagger() * mode_annihilator(s, 1);
  const StateVector lhs = sub.restrict_operator(op) * sub.restrict_vector(v);
  const StateVector rhs = sub.restrict_vector(op.matrix() * v);
  EXPECT_LT((lhs - rhs).norm(), 1e-15);
}
