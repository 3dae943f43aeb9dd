#pragma once

// Register states, the transfer/exchange protocol and its figures of merit.

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qswap/dynamics.hpp"
#include "qswap/model.hpp"

namespace qswap {

/// N-qubit register state as amplitudes over N-bit strings. Bit j of the
/// key (left to right) is qubit j.
struct LogicalState {
  int n_qubits = 0;
  std::map<std::string, cplx> amplitudes;

  /// Throws std::invalid_argument on malformed keys or a norm off by > 1e-10.
  void validate() const;
};

enum class StateKind { bell_psi_plus, bell_psi_minus, bell_phi_plus, bell_phi_minus, ghz, w, vacuum };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);

LogicalState make_named_state(StateKind kind, int n_qubits);
LogicalState make_named_state(const std::string& kind, int n_qubits);

/// |A> (x) |B> (x) |g> with logical 0/1 mapped onto Fock 0/1.
QuantumState embed_logical(const LogicalState& a, const LogicalState& b, const SpaceDescriptor& space);

/// Registers swapped pair by pair. An excitation arriving in a_j picks up
/// phase_a[j], one arriving in b_{pairing[j]} picks up phase_b[j]. Pairs with
/// swapped[j] == false keep their contents and get no phase. Empty pairing
/// means identity.
QuantumState swapped_product(const LogicalState& a, const LogicalState& b, const SpaceDescriptor& space,
                             std::span<const cplx> phase_a, std::span<const cplx> phase_b,
                             std::span<const int> pairing = {}, const std::vector<bool>& swapped = {});

/// Ideal output of one swap time: registers exchanged, phases exp(i phi_j pi)
/// on a_j and exp(i theta_j pi) on the partner b mode. Requires uniform |lambda_j|.
QuantumState ideal_target(const LogicalState& a, const LogicalState& b, const EffectiveParams& eff,
                          const SpaceDescriptor& space, std::span<const int> pairing = {});

/// sqrt(<psi|rho|psi>) clamped to [0, 1].
double fidelity(const QuantumState& rho, const QuantumState& target);

/// Diagonal operator prod_j exp(-i phi_j pi n_aj) exp(-i theta_j pi n_bj) that
/// strips the protocol phases from an output state.
Operator phase_correction_operator(const EffectiveParams& eff, const SpaceDescriptor& space,
                                   std::span<const int> pairing = {});

enum class Method { full_lindblad, full_unitary, effective };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct ProtocolOptions {
  Method method = Method::full_lindblad;
  /// Include the direct mode-mode couplings of DeviceParams::crosstalk.
  bool crosstalk = false;
  int fock_levels = 3;
  Integrator integrator = Integrator::split;
  /// 0 selects the integrator default.
  double dt = 0.0;
  double isolation_margin = kDefaultIsolationMargin;
};

struct ProtocolDiagnostics {
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
  double max_hermiticity_error = 0.0;
  double max_norm_drift = 0.0;
  /// max |<N_tot>(t) - <N_tot>(0)| over the run.
  double excitation_drift = 0.0;
  std::size_t steps = 0;
};

struct ProtocolResult {
  double fidelity = 0.0;
  /// Time average of <sigma+ sigma> over the run.
  double avg_coupler_excitation = 0.0;
  double swap_time = 0.0;
  Method method = Method::full_lindblad;
  QuantumState final_state;
  IsolationReport isolation;
  ProtocolDiagnostics diagnostics;
};

/// Evolves embed_logical(a, b) for one swap time and scores it against
/// ideal_target. Throws std::invalid_argument for non-uniform |lambda_j|.
ProtocolResult run_protocol(const DeviceParams& params, const LogicalState& a, const LogicalState& b,
                            const ProtocolOptions& options = {});

struct StaggerSchedule {
  std::vector<double> on_time;   // tau_j
  std::vector<double> duration;  // t_j; 0 leaves the pair switched off
  double t_max = 0.0;
};

StaggerSchedule compute_stagger_schedule(std::span<const double> lambdas);

/// Piecewise evolution under the bare swap Hamiltonian with pair j active on
/// [tau_j, t_max]. Dissipation is not modelled.
ProtocolResult run_staggered(const DeviceParams& params, const LogicalState& a, const LogicalState& b,
                             const StaggerSchedule& schedule, int fock_levels = 3);

}  // namespace qswap
