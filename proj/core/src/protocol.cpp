#include "qswap/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qswap {

void LogicalState::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("logical state needs at least one qubit");
  if (amplitudes.empty()) throw std::invalid_argument("logical state has no amplitudes");
  double norm = 0.0;
  for (const auto& [bits, amp] : amplitudes) {
    if (bits.size() != static_cast<std::size_t>(n_qubits)) {
      throw std::invalid_argument("bit string '" + bits + "' does not have " + std::to_string(n_qubits) + " bits");
    }
    if (bits.find_first_not_of("01") != std::string::npos) {
      throw std::invalid_argument("bit string '" + bits + "' contains characters other than 0/1");
    }
    norm += std::norm(amp);
  }
  if (std::abs(norm - 1.0) > 1e-10) throw std::invalid_argument("logical state is not normalized");
}

namespace {

constexpr std::pair<StateKind, const char*> kKindNames[] = {
    {StateKind::bell_psi_plus, "bell_psi_plus"}, {StateKind::bell_psi_minus, "bell_psi_minus"},
    {StateKind::bell_phi_plus, "bell_phi_plus"}, {StateKind::bell_phi_minus, "bell_phi_minus"},
    {StateKind::ghz, "ghz"},
    {StateKind::w, "w"},
    {StateKind::vacuum, "vacuum"},
};

constexpr std::pair<Method, const char*> kMethodNames[] = {
    {Method::full_lindblad, "full_lindblad"},
    {Method::full_unitary, "full_unitary"},
    {Method::effective, "effective"},
};

std::vector<int> resolve_pairing(std::span<const int> pairing, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  if (pairing.empty()) {
    for (int j = 0; j < n; ++j) p[static_cast<std::size_t>(j)] = j;
    return p;
  }
  if (pairing.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("pairing size mismatch");
  std::set<int> seen(pairing.begin(), pairing.end());
  if (seen.size() != p.size() || *seen.begin() != 0 || *seen.rbegin() != n - 1) {
    throw std::invalid_argument("pairing must be a permutation");
  }
  std::copy(pairing.begin(), pairing.end(), p.begin());
  return p;
}

std::vector<int> pairing_of(const DeviceParams& params) {
  std::vector<int> p;
  for (int j = 0; j < params.n_pairs(); ++j) p.push_back(params.partner_b(j));
  return p;
}

cplx power(cplx base, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace

std::string to_string(StateKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

StateKind state_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  throw ConfigError("unknown state kind '" + name + "'");
}

std::string to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "full") return Method::full_lindblad;
  for (const auto& [m, n] : kMethodNames) {
    if (name == n) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

LogicalState make_named_state(StateKind kind, int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  const bool bell = kind == StateKind::bell_psi_plus || kind == StateKind::bell_psi_minus ||
                    kind == StateKind::bell_phi_plus || kind == StateKind::bell_phi_minus;
  if (bell && n_qubits != 2) throw std::invalid_argument("Bell states are defined for two qubits only");
  const double r = 1.0 / std::sqrt(2.0);
  LogicalState s{n_qubits, {}};
  const std::string zeros(static_cast<std::size_t>(n_qubits), '0');
  const std::string ones(static_cast<std::size_t>(n_qubits), '1');
  switch (kind) {
    case StateKind::bell_psi_plus: s.amplitudes = {{"01", r}, {"10", r}}; break;
    case StateKind::bell_psi_minus: s.amplitudes = {{"01", r}, {"10", -r}}; break;
    case StateKind::bell_phi_plus: s.amplitudes = {{"00", r}, {"11", r}}; break;
    case StateKind::bell_phi_minus: s.amplitudes = {{"00", r}, {"11", -r}}; break;
    case StateKind::ghz:
      if (n_qubits == 1) throw std::invalid_argument("GHZ needs at least two qubits");
      s.amplitudes = {{zeros, r}, {ones, r}};
      break;
    case StateKind::w: {
      const double w = 1.0 / std::sqrt(static_cast<double>(n_qubits));
      for (int j = 0; j < n_qubits; ++j) {
        std::string bits = zeros;
        bits[static_cast<std::size_t>(j)] = '1';
        s.amplitudes[bits] = w;
      }
      break;
    }
    case StateKind::vacuum: s.amplitudes = {{zeros, 1.0}}; break;
  }
  return s;
}

LogicalState make_named_state(const std::string& kind, int n_qubits) {
  return make_named_state(state_kind_from_string(kind), n_qubits);
}

QuantumState swapped_product(const LogicalState& a, const LogicalState& b, const SpaceDescriptor& space,
                             std::span<const cplx> phase_a, std::span<const cplx> phase_b,
                             std::span<const int> pairing, const std::vector<bool>& swapped) {
  a.validate();
  b.validate();
  const int n = space.n_pairs();
  if (a.n_qubits != n || b.n_qubits != n) throw std::invalid_argument("register size differs from the pair count");
  if (phase_a.size() != static_cast<std::size_t>(n) || phase_b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("one phase per pair required");
  }
  if (!swapped.empty() && swapped.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("swap mask size mismatch");
  }
  const auto perm = resolve_pairing(pairing, n);
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(space.total_dim()));
  std::vector<int> digits(static_cast<std::size_t>(space.n_slots()), 0);
  for (const auto& [xa, ca] : a.amplitudes) {
    for (const auto& [xb, cb] : b.amplitudes) {
      cplx amp = ca * cb;
      for (int j = 0; j < n; ++j) {
        digits[static_cast<std::size_t>(space.mode_a(j))] = xa[static_cast<std::size_t>(j)] - '0';
        digits[static_cast<std::size_t>(space.mode_b(j))] = xb[static_cast<std::size_t>(j)] - '0';
      }
      for (int j = 0; j < n; ++j) {
        if (!swapped.empty() && !swapped[static_cast<std::size_t>(j)]) continue;
        const auto sa = static_cast<std::size_t>(space.mode_a(j));
        const auto sb = static_cast<std::size_t>(space.mode_b(perm[static_cast<std::size_t>(j)]));
        const int na = xb[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] - '0';
        const int nb = xa[static_cast<std::size_t>(j)] - '0';
        digits[sa] = na;
        digits[sb] = nb;
        amp *= power(phase_a[static_cast<std::size_t>(j)], na) * power(phase_b[static_cast<std::size_t>(j)], nb);
      }
      digits[static_cast<std::size_t>(space.coupler_slot())] = 0;
      v(static_cast<Eigen::Index>(space.index(digits))) += amp;
    }
  }
  return QuantumState::pure(space, std::move(v));
}

QuantumState embed_logical(const LogicalState& a, const LogicalState& b, const SpaceDescriptor& space) {
  const int n = space.n_pairs();
  if (a.n_qubits != n || b.n_qubits != n) throw std::invalid_argument("register size differs from the pair count");
  const std::vector<cplx> ones(static_cast<std::size_t>(n), 1.0);
  return swapped_product(a, b, space, ones, ones, {}, std::vector<bool>(static_cast<std::size_t>(n), false));
}

QuantumState ideal_target(const LogicalState& a, const LogicalState& b, const EffectiveParams& eff,
                          const SpaceDescriptor& space, std::span<const int> pairing) {
  if (!eff.uniform) throw std::invalid_argument("ideal target needs uniform |lambda_j|; use the staggered protocol");
  std::vector<cplx> pa;
  std::vector<cplx> pb;
  for (std::size_t j = 0; j < eff.phi.size(); ++j) {
    pa.push_back(std::polar(1.0, eff.phi[j] * kPi));
    pb.push_back(std::polar(1.0, eff.theta[j] * kPi));
  }
  return swapped_product(a, b, space, pa, pb, pairing);
}

double fidelity(const QuantumState& rho, const QuantumState& target) {
  if (!(rho.space() == target.space())) throw std::invalid_argument("fidelity of states on different spaces");
  if (!target.is_pure()) throw std::invalid_argument("fidelity target must be pure");
  const StateVector& psi = target.amplitudes();
  double overlap = 0.0;
  if (rho.is_pure()) {
    overlap = std::norm(psi.dot(rho.amplitudes()));
  } else {
    overlap = psi.dot(rho.density_matrix() * psi).real();
  }
  return std::sqrt(std::clamp(overlap, 0.0, 1.0));
}

Operator phase_correction_operator(const EffectiveParams& eff, const SpaceDescriptor& space,
                                   std::span<const int> pairing) {
  const int n = space.n_pairs();
  if (eff.phi.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("parameter/space size mismatch");
  const auto perm = resolve_pairing(pairing, n);
  const auto dim = space.total_dim();
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(dim), 1));
  for (std::size_t i = 0; i < dim; ++i) {
    const auto d = space.digits(i);
    double phase = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto js = static_cast<std::size_t>(j);
      phase -= eff.phi[js] * kPi * d[static_cast<std::size_t>(space.mode_a(j))];
      phase -= eff.theta[js] * kPi * d[static_cast<std::size_t>(space.mode_b(perm[js]))];
    }
    m.insert(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::polar(1.0, phase);
  }
  m.makeCompressed();
  return Operator(space, std::move(m));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Channel> lindblad_channels(const DeviceParams& params, const SpaceDescriptor& space) {
  std::vector<Channel> out;
  for (int slot = 0; slot < 2 * space.n_pairs(); ++slot) {
    out.push_back({mode_annihilator(space, slot), params.slot_decay_rate(slot)});
  }
  out.push_back({coupler_sigma(space), params.gamma});
  return out;
}

int max_register_excitation(const LogicalState& s) {
  int best = 0;
  for (const auto& [bits, amp] : s.amplitudes) {
    if (amp != cplx(0.0)) best = std::max(best, static_cast<int>(std::count(bits.begin(), bits.end(), '1')));
  }
  return best;
}

}  // namespace

ProtocolResult run_protocol(const DeviceParams& params, const LogicalState& a, const LogicalState& b,
                            const ProtocolOptions& options) {
  params.validate();
  a.validate();
  b.validate();
  const EffectiveParams eff = compute_effective_params(params);
  if (!eff.uniform) throw std::invalid_argument("effective couplings |lambda_j| differ between pairs; use run_staggered");
  const SpaceDescriptor space = make_space(params.n_pairs(), options.fock_levels);
  const auto pairing = pairing_of(params);
  const QuantumState psi0 = embed_logical(a, b, space);
  const QuantumState target = ideal_target(a, b, eff, space, pairing);
  const double t_swap = eff.swap_time();

  const TimeDependentHamiltonian h = options.method == Method::effective
                                         ? effective_hamiltonian(params, space)
                                         : interaction_hamiltonian(params, space, options.crosstalk);

  EvolutionSpec spec;
  spec.t_final = t_swap;
  spec.integrator = options.integrator;
  spec.dt = options.dt;
  spec.excitation_cutoff = max_register_excitation(a) + max_register_excitation(b);
  spec.observables = {{"pe", coupler_projector(space, 1)}, {"n_tot", total_excitation(space)}};
  if (options.method == Method::full_lindblad) {
    spec.collapse_channels = lindblad_channels(params, space);
    spec.dephasing_channels = {{coupler_sigma_z(space), params.gamma_phi}};
  }

  const bool lindblad = options.method == Method::full_lindblad;
  Trajectory traj = lindblad ? evolve_lindblad(h, QuantumState::density(space, psi0.density_matrix()), spec)
                             : evolve_schrodinger(h, psi0, spec);

  ProtocolDiagnostics diag;
  diag.max_trace_drift = traj.max_trace_drift;
  diag.min_eigenvalue = lindblad ? traj.min_eigenvalue : 0.0;
  diag.max_hermiticity_error = traj.max_hermiticity_error;
  diag.max_norm_drift = traj.max_norm_drift;
  diag.steps = traj.steps;
  const auto& n_tot = traj.observables.at("n_tot");
  for (double x : n_tot) diag.excitation_drift = std::max(diag.excitation_drift, std::abs(x - n_tot.front()));

  const double f = fidelity(traj.final_state(), target);
  const double pe = traj.time_average("pe");
  return ProtocolResult{f,
                        pe,
                        t_swap,
                        options.method,
                        traj.final_state(),
                        check_isolation(params, options.isolation_margin),
                        diag};
}

StaggerSchedule compute_stagger_schedule(std::span<const double> lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("no couplings given");
  StaggerSchedule s;
  for (double l : lambdas) {
    if (l == 0.0 || !std::isfinite(l)) throw std::invalid_argument("stagger schedule needs nonzero couplings");
    s.duration.push_back(kPi / (2.0 * std::abs(l)));
  }
  s.t_max = *std::max_element(s.duration.begin(), s.duration.end());
  for (double t : s.duration) s.on_time.push_back(s.t_max - t);
  return s;
}

ProtocolResult run_staggered(const DeviceParams& params, const LogicalState& a, const LogicalState& b,
                             const StaggerSchedule& schedule, int fock_levels) {
  params.validate();
  a.validate();
  b.validate();
  const int n = params.n_pairs();
  const auto ns = static_cast<std::size_t>(n);
  if (schedule.on_time.size() != ns || schedule.duration.size() != ns) {
    throw std::invalid_argument("schedule size differs from the pair count");
  }
  if (!(schedule.t_max > 0.0)) throw std::invalid_argument("schedule t_max must be positive");
  const EffectiveParams eff = compute_effective_params(params);
  const double tol = 1e-9 * schedule.t_max;
  std::vector<bool> active(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    const double tau = schedule.on_time[j];
    const double dur = schedule.duration[j];
    if (tau < 0.0 || dur < 0.0 || std::abs(tau + dur - schedule.t_max) > tol) {
      throw std::invalid_argument("schedule entries must satisfy tau_j + t_j = t_max with both >= 0");
    }
    active[j] = dur > 0.0;
    if (active[j] && std::abs(dur - kPi / (2.0 * std::abs(eff.lambda[j]))) > 1e-9 * dur) {
      throw std::invalid_argument("schedule duration of pair " + std::to_string(j + 1) +
                                  " does not match its effective coupling");
    }
  }

  const SpaceDescriptor space = make_space(n, fock_levels);
  const auto pairing = pairing_of(params);
  const QuantumState psi0 = embed_logical(a, b, space);
  std::vector<cplx> ph;
  for (std::size_t j = 0; j < ns; ++j) ph.push_back(eff.lambda[j] > 0.0 ? cplx(0.0, 1.0) : cplx(0.0, -1.0));
  const QuantumState target = swapped_product(a, b, space, ph, ph, pairing, active);

  // Switching instants split [0, t_max] into intervals with a fixed set of
  // active pairs; each interval is one exact propagation step.
  std::vector<double> cuts{0.0, schedule.t_max};
  for (std::size_t j = 0; j < ns; ++j) {
    if (active[j]) cuts.push_back(schedule.on_time[j]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [&](double x, double y) { return std::abs(x - y) <= tol; }),
             cuts.end());

  const int cutoff = max_register_excitation(a) + max_register_excitation(b);
  QuantumState state = psi0;
  ProtocolDiagnostics diag;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double t0 = cuts[s];
    const double span = cuts[s + 1] - t0;
    if (span <= 0.0) continue;
    std::vector<double> lam(ns, 0.0);
    for (std::size_t j = 0; j < ns; ++j) {
      if (active[j] && schedule.on_time[j] <= t0 + tol) lam[j] = eff.lambda[j];
    }
    const auto h = TimeDependentHamiltonian::constant(build_swap_hamiltonian(lam, space, pairing));
    EvolutionSpec spec;
    spec.t_final = span;
    spec.dt = span;
    spec.integrator = Integrator::split;
    spec.excitation_cutoff = cutoff;
    Trajectory traj = evolve_schrodinger(h, state, spec);
    diag.max_norm_drift = std::max(diag.max_norm_drift, traj.max_norm_drift);
    diag.steps += traj.steps;
    state = traj.final_state();
  }

  const double f = fidelity(state, target);
  return ProtocolResult{f, 0.0, schedule.t_max, Method::effective, state, check_isolation(params), diag};
}

}  // namespace qswap
