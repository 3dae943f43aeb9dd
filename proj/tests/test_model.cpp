#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qswap/model.hpp"
#include "support.hpp"

using namespace qswap;
using namespace qswap::testing;

namespace {

double spectral_norm(const DenseMatrix& m) {
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

TEST(Isolation, ExchangeDeviceAtNinePointThreePasses) {
  const auto p = two_pair_device(9.3, true);
  const auto rep = check_isolation(p, 1.0);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.errors.empty());
  ASSERT_FALSE(rep.cross.empty());
  // Delta_1 = -Delta_2 makes the denominator vanish: no mediated cross coupling.
  const auto& first = rep.cross.front();
  EXPECT_TRUE(std::isinf(first.ratio));
  for (const auto& d : rep.dispersive) EXPECT_NEAR(d.ratio, 9.3, 1e-9);
  EXPECT_NEAR(rep.worst_margin, 9.3, 1e-9);
}

TEST(Isolation, EqualDetuningsFail) {
  auto p = two_pair_device(9.3, false);
  p.omega_a[1] = p.omega_a[0];
  p.omega_b[1] = p.omega_b[0];
  const auto rep = check_isolation(p, 1.0);
  EXPECT_FALSE(rep.pass);
  bool found_zero = false;
  for (const auto& e : rep.cross) {
    if (e.ratio == 0.0) {
      found_zero = true;
      EXPECT_FALSE(e.ok);
    }
  }
  EXPECT_TRUE(found_zero);
}

TEST(Isolation, SinglePairHasNoCrossTerms) {
  const auto rep = check_isolation(one_pair_device(5.5, false));
  EXPECT_TRUE(rep.cross.empty());
  EXPECT_EQ(rep.dispersive.size(), 2u);
  EXPECT_TRUE(rep.pass);
}

TEST(Isolation, AlphaOneFails) {
  const auto rep = check_isolation(two_pair_device(1.0, false));
  EXPECT_FALSE(rep.pass);
  for (const auto& d : rep.dispersive) EXPECT_FALSE(d.ok);
}

TEST(Coupling, LambdaArithmetic) {
  const double lam = lambda_equal_detuning(mhz(100), mhz(100), mhz(550));
  EXPECT_NEAR(lam / kTwoPi / 1e6, 100.0 * 100.0 / 550.0, 1e-9);
  EXPECT_NEAR(lam / kTwoPi / 1e6, 18.1818, 1e-4);
  for (double d : {mhz(550), mhz(-930), mhz(123.4)}) {
    EXPECT_EQ(lambda_general(mhz(100), mhz(80), d, d), lambda_equal_detuning(mhz(100), mhz(80), d));
  }
}

TEST(Coupling, EffectiveParamsForTransferDevice) {
  const auto eff = compute_effective_params(two_pair_device(5.5, false));
  ASSERT_EQ(eff.lambda.size(), 2u);
  EXPECT_NEAR(eff.lambda[0], kG / 5.5, 1e-6);
  EXPECT_NEAR(eff.lambda[1], -kG / 5.5, 1e-6);
  EXPECT_TRUE(eff.uniform);
  EXPECT_NEAR(eff.swap_time(), kPi / (2.0 * kG / 5.5), 1e-18);
  // Equal couplings: phi = (lambda_j + g^2/Delta_j) / (2 lambda) = +-1, so every
  // arriving excitation picks up exp(i phi pi) = -1.
  for (std::size_t j = 0; j < 2; ++j) {
    const double sign = j == 0 ? 1.0 : -1.0;
    EXPECT_NEAR(eff.phi[j], sign, 1e-12);
    EXPECT_NEAR(eff.theta[j], sign, 1e-12);
    EXPECT_NEAR(std::polar(1.0, eff.phi[j] * kPi).real(), -1.0, 1e-12);
  }
}

TEST(Hamiltonian, InteractionAtZeroTime) {
  const auto p = one_pair_device(5.5, false);
  const auto s = make_space(1, 3);
  const Operator h = build_interaction_hamiltonian(p, s, 0.0);
  const Operator sp = coupler_sigma(s).dagger();
  Operator x = (mode_annihilator(s, 0) + mode_annihilator(s, 1)) * sp * cplx(kG);
  x += x.dagger();
  EXPECT_LT((h.dense() - x.dense()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(h.is_hermitian(1e-6));
}

TEST(Hamiltonian, InteractionNormIsTimeIndependent) {
  const auto p = two_pair_device(5.5, false);
  const auto s = make_space(2, 3);
  const double n0 = spectral_norm(build_interaction_hamiltonian(p, s, 0.0).dense());
  const auto n_tot = total_excitation(s);
  for (double t : {1e-9, 7e-9, 13.3e-9}) {
    const Operator h = build_interaction_hamiltonian(p, s, t);
    EXPECT_TRUE(h.is_hermitian(1e-6 * kG));
    EXPECT_NEAR(spectral_norm(h.dense()), n0, 1e-9 * n0);
    EXPECT_LT(commutator(h, n_tot).max_abs(), 1e-6);
  }
}

TEST(Hamiltonian, RotatingFormMatchesDirectEvaluation) {
  const auto p = two_pair_device(7.0, false);
  const auto s = make_space(2, 3);
  const auto td = interaction_hamiltonian(p, s);
  ASSERT_TRUE(td.has_rotating_form());
  for (double t : {0.0, 2.5e-9, 11e-9}) {
    const DenseMatrix direct = build_interaction_hamiltonian(p, s, t).dense();
    EXPECT_LT((td.at(t).dense() - direct).cwiseAbs().maxCoeff(), 1e-6 * kG * 1e-6);
    // e^{iRt} S e^{-iRt} by hand
    const RealVector r = frame_energies(p, s);
    DenseMatrix manual = td.static_part().dense();
    for (Eigen::Index i = 0; i < manual.rows(); ++i) {
      for (Eigen::Index j = 0; j < manual.cols(); ++j) manual(i, j) *= std::polar(1.0, (r(i) - r(j)) * t);
    }
    EXPECT_LT((manual - direct).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Hamiltonian, EffectivePartsCommuteWithSigmaZ) {
  const auto p = two_pair_device(9.3, false);
  const auto s = make_space(2, 3);
  const auto sz = coupler_sigma_z(s);
  for (double t : {0.0, 3e-9}) {
    const auto eh = build_effective_hamiltonians(p, s, t);
    EXPECT_LT(commutator(eh.h0, sz).max_abs(), 1e-9);
    EXPECT_LT(commutator(eh.hint, sz).max_abs(), 1e-9);
    EXPECT_TRUE(eh.h0.is_hermitian(1e-3));
    EXPECT_TRUE(eh.hint.is_hermitian(1e-3));
  }
}

TEST(Hamiltonian, GroundProjectionOfHintIsSwapHamiltonian) {
  const auto p = two_pair_device(5.5, false);
  const auto s = make_space(2, 3);
  const auto eh = build_effective_hamiltonians(p, s, 0.0);
  const auto pg = coupler_projector(s, 0);
  const DenseMatrix projected = (pg * eh.hint * pg).dense();
  const DenseMatrix he = (pg * build_swap_hamiltonian(p, s) * pg).dense();
  EXPECT_LT((projected - he).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_GT(he.cwiseAbs().maxCoeff(), 1e6);
}

TEST(Hamiltonian, SwapHamiltonianProperties) {
  const auto s = make_space(2, 3);
  const std::vector<double> lam{mhz(18.18), -mhz(18.18)};
  const Operator he = build_swap_hamiltonian(lam, s);
  EXPECT_TRUE(he.is_hermitian());
  Operator nmodes = Operator::zero(s);
  for (int slot = 0; slot < 4; ++slot) nmodes += mode_number(s, slot);
  EXPECT_EQ(commutator(he, nmodes).max_abs(), 0.0);
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_EQ(build_swap_hamiltonian(zero, s).max_abs(), 0.0);

  // Explicit Kronecker form: -lambda_1 (a1 b1+ + h.c.) - lambda_2 (a2 b2+ + h.c.)
  std::vector<Eigen::MatrixXcd> f(5, Eigen::MatrixXcd::Identity(3, 3));
  f[4] = Eigen::MatrixXcd::Identity(2, 2);
  DenseMatrix expected = DenseMatrix::Zero(162, 162);
  for (int j = 0; j < 2; ++j) {
    auto g = f;
    g[static_cast<std::size_t>(j)] = ladder(3);
    g[static_cast<std::size_t>(j + 2)] = ladder(3).adjoint();
    const DenseMatrix t = kron_all(g);
    expected -= lam[static_cast<std::size_t>(j)] * (t + t.adjoint());
  }
  EXPECT_LT((he.dense() - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Hamiltonian, PairingRoutesTheSwap) {
  const auto s = make_space(2, 2);
  const std::vector<double> lam{1.0, 2.0};
  const std::vector<int> crossed{1, 0};
  const Operator he = build_swap_hamiltonian(lam, s, crossed);
  // a_1 couples to b_2 (slot 3) with strength lambda_1.
  const Operator term = mode_annihilator(s, 0) * mode_annihilator(s, 3).dagger();
  const DenseMatrix overlap = (he * term.dagger()).dense();
  EXPECT_NEAR(-overlap.trace().real() / (term * term.dagger()).dense().trace().real(), 1.0, 1e-12);
}

TEST(Matching, EqualCouplingsReturnSameDetuning) {
  for (double d : {mhz(500), mhz(-930), mhz(37)}) {
    EXPECT_EQ(solve_detuning_matching(mhz(100), mhz(100), d), d);
  }
}

TEST(Matching, ResidualOfWorkedExample) {
  const double g = mhz(100), mu = mhz(80), da = mhz(500);
  for (auto root : {MatchingRoot::plus, MatchingRoot::minus}) {
    const double db = solve_detuning_matching(g, mu, da, root);
    EXPECT_TRUE(std::isfinite(db));
    EXPECT_LT(std::abs(detuning_matching_residual(g, mu, da, db)), 1e-12);
    // Independent check of g^2/Da - mu^2/Db + (Da - Db) = 0.
    const double lhs = g * g / da - mu * mu / db + (da - db);
    EXPECT_LT(std::abs(lhs) / (g * g / std::abs(da)), 1e-10);
  }
}

TEST(Matching, NegativeDiscriminantThrows) {
  EXPECT_THROW(solve_detuning_matching(mhz(100), mhz(2000), mhz(100)), std::domain_error);
}

TEST(Crosstalk, ZeroCrosstalkReducesToInteraction) {
  auto p = two_pair_device(5.5, false);
  set_uniform_crosstalk(p, 0.0);
  const auto s = make_space(2, 3);
  for (double t : {0.0, 4e-9}) {
    const auto with = interaction_hamiltonian(p, s, true).at(t).dense();
    const auto without = build_interaction_hamiltonian(p, s, t).dense();
    EXPECT_EQ((with - without).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Crosstalk, UniformTermsScaleWithFraction) {
  auto p = two_pair_device(5.5, false);
  set_uniform_crosstalk(p, 0.01);
  EXPECT_EQ(p.crosstalk.size(), 6u);
  for (const auto& [key, v] : p.crosstalk) {
    EXPECT_LT(key.first, key.second);
    EXPECT_DOUBLE_EQ(v, 0.01 * kG);
  }
  const auto s = make_space(2, 3);
  const auto x = build_crosstalk_hamiltonian(p, s, 3e-9) - build_interaction_hamiltonian(p, s, 3e-9);
  EXPECT_TRUE(x.is_hermitian(1e-9));
  EXPECT_NEAR(x.max_abs() / kG, 0.01 * 2.0, 1e-12);  // sqrt(2) sqrt(2) on |2><1| x |0><1|
}

TEST(Crosstalk, MatchedPairTermIsStatic) {
  auto p = two_pair_device(5.5, false);
  p.crosstalk.clear();
  p.crosstalk[crosstalk_key(0, 2)] = 0.01 * kG;  // a_1 - b_1
  const auto s = make_space(2, 3);
  auto direct = [&](double t) {
    return (build_crosstalk_hamiltonian(p, s, t) - build_interaction_hamiltonian(p, s, t)).dense();
  };
  const DenseMatrix x0 = direct(0.0);
  EXPECT_NEAR(x0.cwiseAbs().maxCoeff(), 0.02 * kG, 1e-6);  // sqrt(2) sqrt(2) on the doubly occupied entry
  for (double t : {1e-9, 5.3e-9}) EXPECT_LT((direct(t) - x0).cwiseAbs().maxCoeff(), 1e-6);
  p.crosstalk.clear();
  p.crosstalk[crosstalk_key(0, 1)] = 0.01 * kG;  // a_1 - a_2 at opposite detunings
  const DenseMatrix y0 = direct(0.0);
  EXPECT_GT((direct(1e-9) - y0).cwiseAbs().maxCoeff(), 1e-3 * kG);
}

TEST(Params, ValidationErrors) {
  auto p = two_pair_device(5.5, true);
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.g.pop_back();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = p;
  bad.kappa_a[0] = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = p;
  bad.omega_a[0] = bad.omega_c;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = p;
  bad.pairing = {0, 0};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = p;
  bad.crosstalk[{0, 7}] = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}
