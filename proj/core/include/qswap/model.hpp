#pragma once

// Device parameters and every Hamiltonian of the coupler-mediated swap
// scheme. All frequencies, couplings and rates are angular (rad/s).
// Detunings are always derived: delta_a[j] = omega_c - omega_a[j].

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qswap/hamiltonian.hpp"
#include "qswap/hilbert.hpp"

namespace qswap {

/// Isolation margin used when the caller does not pass one ("much greater
/// than" read as at least 4x, the low end of the studied detuning range).
inline constexpr double kDefaultIsolationMargin = 4.0;

struct DeviceParams {
  double omega_c = 0.0;
  // Per pair j. omega_b/mu/kappa_b describe the B mode paired with a_j,
  // which is physical mode b_{pairing[j]}.
  std::vector<double> omega_a;
  std::vector<double> omega_b;
  std::vector<double> g;
  std::vector<double> mu;
  std::vector<double> kappa_a;
  std::vector<double> kappa_b;
  double gamma = 0.0;
  double gamma_phi = 0.0;
  /// Direct mode-mode couplings keyed by (slot p, slot q), p < q, using the
  /// slot numbering of SpaceDescriptor (a_j -> j, b_k -> N + k).
  std::map<std::pair<int, int>, double> crosstalk;
  /// pairing[j] = k couples a_j with b_k. Empty means identity.
  std::vector<int> pairing;

  int n_pairs() const noexcept { return static_cast<int>(omega_a.size()); }
  double delta_a(int j) const { return omega_c - omega_a.at(static_cast<std::size_t>(j)); }
  double delta_b(int j) const { return omega_c - omega_b.at(static_cast<std::size_t>(j)); }
  int partner_b(int j) const;
  /// Pair index j whose B partner is physical b_k.
  int pair_of_b(int k) const;
  /// Angular frequency of a bosonic slot.
  double slot_frequency(int slot) const;
  double slot_decay_rate(int slot) const;
  bool has_dissipation() const;

  /// Throws ConfigError on inconsistent sizes, negative rates, zero
  /// couplings, zero detunings or a non-bijective pairing.
  void validate() const;
};

std::pair<int, int> crosstalk_key(int slot_p, int slot_q);
/// Uniform crosstalk of `fraction * g[0]` between every pair of bosonic modes.
void set_uniform_crosstalk(DeviceParams& params, double fraction);

// --- isolation conditions ---------------------------------------------------

struct CrossPairEntry {
  int j = 0;
  int k = 0;
  char mode_j = 'a';  // which detuning of pair j enters (a or b)
  char mode_k = 'a';
  /// |D_j - D_k| / |1/D_j + 1/D_k|; +inf when the mediated coupling vanishes.
  double ratio = 0.0;
  /// max(g_j g_k, g_j mu_k, mu_j mu_k)
  double coupling = 0.0;
  /// ratio / coupling
  double margin = 0.0;
  bool ok = false;
};

struct DispersiveEntry {
  int pair = 0;
  char mode = 'a';
  double detuning = 0.0;
  double coupling = 0.0;
  /// |detuning| / coupling
  double ratio = 0.0;
  bool ok = false;
};

struct IsolationReport {
  double margin_factor = kDefaultIsolationMargin;
  std::vector<CrossPairEntry> cross;
  std::vector<DispersiveEntry> dispersive;
  /// Smallest margin over all entries.
  double worst_margin = 0.0;
  std::vector<std::string> errors;
  bool pass = false;
};

IsolationReport check_isolation(const DeviceParams& params, double margin = kDefaultIsolationMargin);

// --- effective couplings ------------------------------------------------------

/// g mu / delta, the equal-detuning pair coupling.
double lambda_equal_detuning(double g, double mu, double delta);
/// (g mu / 2)(1/delta_a + 1/delta_b); reduces exactly to the equal-detuning form.
double lambda_general(double g, double mu, double delta_a, double delta_b);

struct EffectiveParams {
  std::vector<double> lambda;
  std::vector<double> stark_a;  // g_j^2 / delta_a[j]
  std::vector<double> stark_b;  // mu_j^2 / delta_b[j]
  /// Phase exponents (in units of pi) picked up by an excitation that lands
  /// in a_j (phi) or b_{pairing[j]} (theta) after one swap of duration
  /// pi / (2 lambda_ref).
  std::vector<double> phi;
  std::vector<double> theta;
  /// |lambda_0|; the swap reference.
  double lambda_ref = 0.0;
  /// Whether all |lambda_j| agree with lambda_ref to 1e-9 relative.
  bool uniform = false;

  double swap_time() const { return kPi / (2.0 * lambda_ref); }
};

EffectiveParams compute_effective_params(const DeviceParams& params);

// --- Hamiltonians -------------------------------------------------------------

/// Diagonal R with R_i = sum_p (omega_p - omega_c) n_p(i). The interaction
/// picture Hamiltonians below are exp(iRt) S exp(-iRt) for a static S.
RealVector frame_energies(const DeviceParams& params, const SpaceDescriptor& space);

/// H_I(t) = sum_j (g_j e^{i D_aj t} a_j s+ + mu_j e^{i D_bj t} b_j s+ + h.c.),
/// plus the direct mode-mode crosstalk terms when `with_crosstalk`.
TimeDependentHamiltonian interaction_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space,
                                                 bool with_crosstalk = false);
Operator build_interaction_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space, double t);
/// H_I(t) together with the direct mode-mode terms.
Operator build_crosstalk_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space, double t);

struct EffectiveHamiltonians {
  Operator h0;
  Operator hint;
};

/// Dispersive effective Hamiltonian H0 + Hint(t). H0 carries the ac-Stark
/// shifts on |e><e| and |g><g|; Hint = sum_j lambda_j (e^{i(D_aj - D_bj)t}
/// a_j b_j+ + h.c.) sigma_z.
EffectiveHamiltonians build_effective_hamiltonians(const DeviceParams& params, const SpaceDescriptor& space,
                                                   double t = 0.0);
TimeDependentHamiltonian effective_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space);

/// H_e = -sum_j lambda_j (a_j b_j+ + a_j+ b_j), with b_j the paired mode.
Operator build_swap_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space);
Operator build_swap_hamiltonian(std::span<const double> lambdas, const SpaceDescriptor& space,
                                std::span<const int> pairing = {});

enum class MatchingRoot { plus, minus };

/// Detuning delta_b that removes the residual oscillation of the effective
/// pair coupling when g != mu:
///   g^2/delta_a - mu^2/delta_b = -(delta_a - delta_b).
/// Throws std::domain_error when no real solution exists.
double solve_detuning_matching(double g, double mu, double delta_a, MatchingRoot root = MatchingRoot::plus);

/// Left side minus right side of the matching condition, divided by the
/// largest term magnitude.
double detuning_matching_residual(double g, double mu, double delta_a, double delta_b);

}  // namespace qswap
