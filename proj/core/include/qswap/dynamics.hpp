#pragma once

// Time evolution engines (hbar = 1): pure-state Schrodinger propagation,
// Lindblad master-equation integration, and closed-form effective dynamics
// of the swap Hamiltonian.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qswap/hamiltonian.hpp"
#include "qswap/hilbert.hpp"

namespace qswap {

enum class Integrator {
  rk4,       ///< fixed-step classical Runge-Kutta
  adaptive,  ///< Dormand-Prince 5(4) with embedded error control
  split,     ///< Strang splitting; coherent part exact in the rotating frame
};

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct Channel {
  Operator op;
  double rate = 0.0;
};

struct EvolutionSpec {
  double t_final = 0.0;
  /// rate * (L rho L+ - {L+ L, rho}/2)
  std::vector<Channel> collapse_channels;
  /// rate * (Z rho Z - rho)
  std::vector<Channel> dephasing_channels;
  Integrator integrator = Integrator::rk4;
  /// Fixed step for rk4/split; initial step for adaptive. 0 selects the default.
  double dt = 0.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// Times at which full states are stored. Empty means {t_final}.
  std::vector<double> sample_times;
  /// Expectation values recorded after every integrator step (and at t = 0).
  std::vector<std::pair<std::string, Operator>> observables;
  /// Restrict propagation to basis states with total excitation <= cutoff.
  /// Requires excitation-conserving Hamiltonians and non-raising channels.
  std::optional<int> excitation_cutoff;
  /// Hermitian eigensolve on stored samples.
  bool check_positivity = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<QuantumState> states;
  std::vector<double> observable_times;
  std::map<std::string, std::vector<double>> observables;

  std::size_t steps = 0;
  double max_trace_drift = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  double max_norm_drift = 0.0;

  const QuantumState& final_state() const { return states.back(); }
  /// Trapezoidal time average of a recorded observable over its time grid.
  double time_average(const std::string& name) const;
};

/// min(1 ps, T_fastest / 200) with T_fastest = 2 pi / (fastest frame
/// frequency present in H); 1 ps when H has no rotating form.
double default_rk4_step(const TimeDependentHamiltonian& h);
/// Default step of the split integrator.
double default_split_step(const TimeDependentHamiltonian& h);

Trajectory evolve_schrodinger(const TimeDependentHamiltonian& h, const QuantumState& psi0, const EvolutionSpec& spec);
Trajectory evolve_lindblad(const TimeDependentHamiltonian& h, const QuantumState& rho0, const EvolutionSpec& spec);

// --- closed-form effective dynamics ---------------------------------------------

/// Amplitudes over occupation-number vectors (a_1..a_N, b_1..b_N).
using OccupationAmplitudes = std::map<std::vector<int>, cplx>;

/// exp(-i H_e t) applied to the product of two register states given as
/// maps from N-bit strings to amplitudes. Each pair evolves independently
/// under a+ -> cos(l t) a+ + i sin(l t) b+, b+ -> cos(l t) b+ + i sin(l t) a+;
/// a doubly occupied pair leaks into |2,0> and |0,2> at intermediate times.
OccupationAmplitudes analytic_effective_evolution(const std::map<std::string, cplx>& register_a,
                                                  const std::map<std::string, cplx>& register_b,
                                                  std::span<const double> lambdas, double t);

/// Register contents after exactly one swap time pi/(2 lambda): the pair
/// (cA', cB') with cA' = cB decorated by i^(m_k lambda_k/lambda) and
/// cB' = cA decorated by i^(n_j lambda_j/lambda). Throws
/// std::invalid_argument when the |lambda_j| are not all equal.
std::pair<std::map<std::string, cplx>, std::map<std::string, cplx>> analytic_swap(
    const std::map<std::string, cplx>& register_a, const std::map<std::string, cplx>& register_b,
    std::span<const double> lambdas);

/// Max elementwise deviation between exp(-iH_e t) a+ exp(iH_e t) and
/// cos(lambda t) a+ + i sin(lambda t) b+ for a single pair, computed by
/// matrix exponentiation on the sectors the truncation represents exactly.
double verify_heisenberg_transform(double lambda, double t, int fock_levels = 4);

}  // namespace qswap
