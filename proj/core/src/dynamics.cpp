#include "qswap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qswap/model.hpp"
#include "split_propagator.hpp"

namespace qswap {

std::string to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::rk4: return "rk4";
    case Integrator::adaptive: return "adaptive";
    case Integrator::split: return "split";
  }
  return "unknown";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "rk4") return Integrator::rk4;
  if (name == "adaptive") return Integrator::adaptive;
  if (name == "split") return Integrator::split;
  throw ConfigError("unknown integrator '" + name + "' (expected rk4, adaptive or split)");
}

double Trajectory::time_average(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw std::out_of_range("no observable named " + name);
  const auto& v = it->second;
  if (v.size() != observable_times.size() || v.size() < 2) {
    throw std::logic_error("observable series too short to average");
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    acc += 0.5 * (v[i] + v[i - 1]) * (observable_times[i] - observable_times[i - 1]);
  }
  return acc / (observable_times.back() - observable_times.front());
}

namespace {

double fastest_frame_frequency(const TimeDependentHamiltonian& h) {
  if (!h.has_rotating_form()) return 0.0;
  const auto& r = h.frame_energies();
  const auto& s = h.static_part().matrix();
  double w = 0.0;
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) w = std::max(w, std::abs(r(it.row()) - r(it.col())));
  }
  return w;
}

}  // namespace

double default_rk4_step(const TimeDependentHamiltonian& h) {
  const double w = fastest_frame_frequency(h);
  if (w == 0.0) return 1e-12;
  return std::min(1e-12, (kTwoPi / w) / 200.0);
}

double default_split_step(const TimeDependentHamiltonian& h) {
  (void)h;
  return 20e-12;
}

namespace {

bool is_diagonal(const SparseMatrix& m) {
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col()) return false;
    }
  }
  return true;
}

// Reduced problem: operators restricted to the excitation subspace (when
// requested) with the Hamiltonian either in rotating form or as a callable.
class Problem {
 public:
  Problem(const TimeDependentHamiltonian& h, const SpaceDescriptor& space, const EvolutionSpec& spec)
      : h_(h), space_(space) {
    if (!(h.space() == space)) throw std::invalid_argument("Hamiltonian and state live on different spaces");
    if (!(spec.t_final > 0.0) || !std::isfinite(spec.t_final)) throw std::invalid_argument("t_final must be > 0");
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (spec.dt < 0.0) throw std::invalid_argument("dt must be >= 0");

    samples_ = spec.sample_times.empty() ? std::vector<double>{spec.t_final} : spec.sample_times;
    double prev = 0.0;
    for (double s : samples_) {
      if (!(s > prev) || s > spec.t_final * (1.0 + 1e-12)) {
        throw std::invalid_argument("sample times must be strictly increasing within (0, t_final]");
      }
      prev = s;
    }

    if (spec.excitation_cutoff) {
      sub_.emplace(space, *spec.excitation_cutoff);
      exc_ = excitation_numbers(space);
    }
    dim_ = sub_ ? static_cast<Eigen::Index>(sub_->dim()) : static_cast<Eigen::Index>(space.total_dim());

    if (h.has_rotating_form()) {
      rotating_ = true;
      const auto& rf = h.frame_energies();
      if (sub_) {
        frame_ = RealVector(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) frame_(i) = rf(static_cast<Eigen::Index>(sub_->indices()[static_cast<std::size_t>(i)]));
      } else {
        frame_ = rf;
      }
      check_conserving(h.static_part(), "Hamiltonian");
      static_ = reduce(h.static_part());
    } else if (sub_) {
      check_conserving(h.at(0.0), "Hamiltonian");
    }

    std::vector<std::pair<SparseMatrix, double>> jumps;
    std::vector<std::pair<SparseMatrix, double>> deph;
    for (const auto& c : spec.collapse_channels) {
      if (c.rate < 0.0 || !std::isfinite(c.rate)) throw std::invalid_argument("channel rates must be >= 0");
      if (!(c.op.space() == space)) throw std::invalid_argument("channel operator on a foreign space");
      if (sub_) check_non_raising(c.op);
      if (c.rate > 0.0) jumps.emplace_back(reduce(c.op), c.rate);
    }
    for (const auto& c : spec.dephasing_channels) {
      if (c.rate < 0.0 || !std::isfinite(c.rate)) throw std::invalid_argument("channel rates must be >= 0");
      if (!(c.op.space() == space)) throw std::invalid_argument("channel operator on a foreign space");
      if (sub_) check_conserving(c.op, "dephasing operator");
      if (c.rate > 0.0) deph.emplace_back(reduce(c.op), c.rate);
    }
    has_channels_ = !jumps.empty() || !deph.empty();
    dissipator_ = detail::Dissipator(dim_, std::move(jumps), std::move(deph));

    for (const auto& [name, op] : spec.observables) {
      if (!(op.space() == space)) throw std::invalid_argument("observable on a foreign space");
      SparseMatrix m = reduce(op);
      obs_diag_.push_back(is_diagonal(m));
      obs_.emplace_back(name, std::move(m));
    }
  }

  Eigen::Index dim() const { return dim_; }
  bool rotating() const { return rotating_; }
  bool has_channels() const { return has_channels_; }
  const std::vector<double>& samples() const { return samples_; }
  const detail::Dissipator& dissipator() const { return dissipator_; }
  const RealVector& frame() const { return frame_; }
  const SparseMatrix& static_part() const { return static_; }
  const std::vector<std::pair<std::string, SparseMatrix>>& observables() const { return obs_; }
  bool observable_diagonal(std::size_t i) const { return obs_diag_[i]; }

  std::vector<std::size_t> block_offsets() const {
    if (sub_) return sub_->sector_offsets();
    return {0, static_cast<std::size_t>(dim_)};
  }

  void hamiltonian_at(double t, SparseMatrix& out) const {
    if (rotating_) {
      const bool same = out.rows() == static_.rows() && out.nonZeros() == static_.nonZeros() && out.isCompressed();
      if (!same) out = static_;
      for (Eigen::Index k = 0; k < static_.outerSize(); ++k) {
        SparseMatrix::InnerIterator src(static_, k);
        SparseMatrix::InnerIterator dst(out, k);
        for (; src; ++src, ++dst) {
          const double w = frame_(src.row()) - frame_(src.col());
          dst.valueRef() = w == 0.0 ? src.value() : src.value() * std::polar(1.0, w * t);
        }
      }
      return;
    }
    out = reduce(h_.at(t));
  }

  SparseMatrix reduce(const Operator& op) const {
    if (sub_) return sub_->restrict_operator(op);
    return op.matrix();
  }

  StateVector reduce_vector(const StateVector& v) const {
    if (!sub_) return v;
    StateVector r = sub_->restrict_vector(v);
    if (std::abs(r.squaredNorm() - v.squaredNorm()) > 1e-14 * std::max(1.0, v.squaredNorm())) {
      throw std::invalid_argument("initial state has weight above the excitation cutoff");
    }
    return r;
  }

  DenseMatrix reduce_density(const DenseMatrix& rho) const {
    if (!sub_) return rho;
    if (ExcitationSubspace::max_excitation(space_, rho) > sub_->cutoff()) {
      throw std::invalid_argument("initial state has weight above the excitation cutoff");
    }
    return sub_->restrict_density(rho);
  }

  StateVector lift_vector(const StateVector& v) const { return sub_ ? sub_->lift_vector(v) : v; }
  DenseMatrix lift_density(const DenseMatrix& r) const { return sub_ ? sub_->lift_density(r) : r; }

 private:
  void check_conserving(const Operator& op, const char* what) const {
    if (!sub_) return;
    const auto& m = op.matrix();
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        if (exc_[static_cast<std::size_t>(it.row())] != exc_[static_cast<std::size_t>(it.col())]) {
          throw std::invalid_argument(std::string(what) + " does not conserve the excitation number");
        }
      }
    }
  }

  void check_non_raising(const Operator& op) const {
    const auto& m = op.matrix();
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        if (exc_[static_cast<std::size_t>(it.row())] > exc_[static_cast<std::size_t>(it.col())]) {
          throw std::invalid_argument("collapse operator raises the excitation number");
        }
      }
    }
  }

  const TimeDependentHamiltonian& h_;
  SpaceDescriptor space_;
  std::optional<ExcitationSubspace> sub_;
  std::vector<int> exc_;
  Eigen::Index dim_ = 0;
  bool rotating_ = false;
  bool has_channels_ = false;
  RealVector frame_;
  SparseMatrix static_;
  detail::Dissipator dissipator_;
  std::vector<double> samples_;
  std::vector<std::pair<std::string, SparseMatrix>> obs_;
  std::vector<bool> obs_diag_;
};

// exp(iRt) X exp(-iRt) for diagonal R.
DenseMatrix to_interaction_frame(const DenseMatrix& rho, const RealVector& frame, double t) {
  Eigen::VectorXcd p(frame.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::polar(1.0, frame(i) * t);
  return p.asDiagonal() * rho * p.conjugate().asDiagonal();
}

StateVector to_interaction_frame(const StateVector& psi, const RealVector& frame, double t) {
  StateVector out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) out(i) = psi(i) * std::polar(1.0, frame(i) * t);
  return out;
}

[[noreturn]] void fail_nonfinite(double t, double norm) {
  std::ostringstream os;
  os << "integration diverged at t = " << t << " s (state norm " << norm << ")";
  throw NumericalError(os.str());
}

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
constexpr double kB5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kB4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

template <class State, class Rhs>
void rk4_step(const Rhs& rhs, double t, double h, State& y, std::array<State, 5>& w) {
  auto& [k1, k2, k3, k4, tmp] = w;
  rhs(t, y, k1);
  tmp = y + (0.5 * h) * k1;
  rhs(t + 0.5 * h, tmp, k2);
  tmp = y + (0.5 * h) * k2;
  rhs(t + 0.5 * h, tmp, k3);
  tmp = y + h * k3;
  rhs(t + h, tmp, k4);
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One Dormand-Prince attempt; returns the scaled RMS error estimate.
template <class State, class Rhs>
double dp45_attempt(const Rhs& rhs, double t, double h, const State& y, State& y_new, std::array<State, 7>& k,
                    State& tmp, double rel_tol, double abs_tol) {
  rhs(t, y, k[0]);
  for (int s = 1; s < 7; ++s) {
    tmp = y;
    for (int j = 0; j < s; ++j) {
      if (kA[s][j] != 0.0) tmp += (h * kA[s][j]) * k[static_cast<std::size_t>(j)];
    }
    if (s == 6) {
      y_new = tmp;
    }
    rhs(t + kC[s] * h, tmp, k[static_cast<std::size_t>(s)]);
  }
  // FSAL: stage 7 evaluated at y_new gives the embedded estimate.
  tmp.setZero(y.rows(), y.cols());
  for (int s = 0; s < 7; ++s) tmp += (h * (kB5[s] - kB4[s])) * k[static_cast<std::size_t>(s)];
  double acc = 0.0;
  const auto n = static_cast<double>(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double scale = abs_tol + rel_tol * std::max(std::abs(y.data()[i]), std::abs(y_new.data()[i]));
    const double e = std::abs(tmp.data()[i]) / scale;
    acc += e * e;
  }
  return std::sqrt(acc / n);
}

// Fixed- or adaptive-step drive between sample times. `advance(t, h)` takes
// one fixed step; for the adaptive path `attempt(t, h) -> err` tries a step
// and `commit()` accepts it. `record(t)` runs after every accepted step.
template <class Advance, class Record, class Store>
void drive_fixed(const std::vector<double>& samples, double dt, Advance&& advance, Record&& record, Store&& store,
                 std::size_t& steps) {
  double t = 0.0;
  for (double ts : samples) {
    const double span = ts - t;
    const auto n = static_cast<long>(std::max(1.0, std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(n);
    const double t0 = t;
    for (long i = 1; i <= n; ++i) {
      advance(t0 + static_cast<double>(i - 1) * h, h);
      t = i == n ? ts : t0 + static_cast<double>(i) * h;
      ++steps;
      record(t);
    }
    store(ts);
  }
}

template <class Attempt, class Commit, class Record, class Store>
void drive_adaptive(const std::vector<double>& samples, double h0, double t_final, Attempt&& attempt,
                    Commit&& commit, Record&& record, Store&& store, std::size_t& steps) {
  double t = 0.0;
  double h = h0;
  const double h_min = 1e-14 * t_final;
  for (double ts : samples) {
    while (t < ts) {
      const bool last = h >= ts - t;
      const double hs = last ? ts - t : h;
      const double err = attempt(t, hs);
      if (!std::isfinite(err)) {
        h = 0.25 * hs;
      } else if (err <= 1.0) {
        commit();
        t = last ? ts : t + hs;
        ++steps;
        record(t);
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = hs * fac;
      } else {
        h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
      if (h < h_min) {
        std::ostringstream os;
        os << "adaptive step-size underflow at t = " << t << " s (h = " << h << ")";
        throw NumericalError(os.str());
      }
    }
    store(ts);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Trajectory evolve_schrodinger(const TimeDependentHamiltonian& h, const QuantumState& psi0, const EvolutionSpec& spec) {
  if (!psi0.is_pure()) throw std::invalid_argument("evolve_schrodinger needs a pure initial state");
  for (const auto* list : {&spec.collapse_channels, &spec.dephasing_channels}) {
    for (const auto& c : *list) {
      if (c.rate != 0.0) throw std::invalid_argument("dissipative channels require evolve_lindblad");
    }
  }
  const SpaceDescriptor& space = psi0.space();
  Problem prob(h, space, spec);
  StateVector psi = prob.reduce_vector(psi0.amplitudes());
  const double norm0 = psi.norm();

  Trajectory traj;
  const bool frame_state = spec.integrator == Integrator::split;
  auto interaction_state = [&](double t) -> StateVector {
    return frame_state ? to_interaction_frame(psi, prob.frame(), t) : psi;
  };
  auto record = [&](double t) {
    const double nrm = psi.norm();
    if (!std::isfinite(nrm)) fail_nonfinite(t, nrm);
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(nrm - norm0));
    if (prob.observables().empty()) return;
    StateVector vi;
    bool have_vi = false;
    traj.observable_times.push_back(t);
    for (std::size_t i = 0; i < prob.observables().size(); ++i) {
      const auto& [name, op] = prob.observables()[i];
      const StateVector* v = &psi;
      if (frame_state && !prob.observable_diagonal(i)) {
        if (!have_vi) {
          vi = interaction_state(t);
          have_vi = true;
        }
        v = &vi;
      }
      StateVector ov = op * (*v);
      traj.observables[name].push_back(v->dot(ov).real());
    }
  };
  auto store = [&](double t) {
    traj.times.push_back(t);
    StateVector full = prob.lift_vector(interaction_state(t));
    traj.states.push_back(QuantumState::pure_unchecked(space, std::move(full)));
  };

  record(0.0);
  SparseMatrix hbuf;
  auto rhs = [&](double t, const StateVector& y, StateVector& out) {
    prob.hamiltonian_at(t, hbuf);
    out.noalias() = cplx(0.0, -1.0) * (hbuf * y);
  };

  switch (spec.integrator) {
    case Integrator::rk4: {
      const double dt = spec.dt > 0.0 ? spec.dt : default_rk4_step(h);
      std::array<StateVector, 5> w;
      drive_fixed(prob.samples(), dt, [&](double t, double hs) { rk4_step(rhs, t, hs, psi, w); }, record, store,
                  traj.steps);
      break;
    }
    case Integrator::adaptive: {
      const double dt = spec.dt > 0.0 ? spec.dt : default_rk4_step(h);
      std::array<StateVector, 7> k;
      StateVector tmp;
      StateVector y_new;
      drive_adaptive(
          prob.samples(), dt, spec.t_final,
          [&](double t, double hs) { return dp45_attempt(rhs, t, hs, psi, y_new, k, tmp, spec.rel_tol, spec.abs_tol); },
          [&] { psi = y_new; }, record, store, traj.steps);
      break;
    }
    case Integrator::split: {
      if (!prob.rotating()) throw std::invalid_argument("split integrator needs a rotating-form Hamiltonian");
      const double dt = spec.dt > 0.0 ? spec.dt : default_split_step(h);
      detail::SplitStepPropagator prop(prob.frame(), prob.static_part(), prob.block_offsets(), detail::Dissipator());
      drive_fixed(
          prob.samples(), dt,
          [&](double, double hs) {
            prop.set_step(hs);
            prop.step_vector(psi);
          },
          record, store, traj.steps);
      break;
    }
  }
  return traj;
}

Trajectory evolve_lindblad(const TimeDependentHamiltonian& h, const QuantumState& rho0, const EvolutionSpec& spec) {
  const SpaceDescriptor& space = rho0.space();
  const DenseMatrix rho_full = rho0.density_matrix();
  if ((rho_full - rho_full.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("initial density matrix is not Hermitian");
  }
  Problem prob(h, space, spec);
  DenseMatrix rho = prob.reduce_density(rho_full);
  const cplx trace0 = rho.trace();

  Trajectory traj;
  const bool frame_state = spec.integrator == Integrator::split;
  auto interaction_state = [&](double t) -> DenseMatrix {
    return frame_state ? to_interaction_frame(rho, prob.frame(), t) : rho;
  };
  auto record = [&](double t) {
    const cplx tr = rho.trace();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag())) fail_nonfinite(t, std::abs(tr));
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(tr - trace0));
    if (prob.observables().empty()) return;
    DenseMatrix ri;
    bool have_ri = false;
    traj.observable_times.push_back(t);
    for (std::size_t i = 0; i < prob.observables().size(); ++i) {
      const auto& [name, op] = prob.observables()[i];
      const DenseMatrix* r = &rho;
      if (frame_state && !prob.observable_diagonal(i)) {
        if (!have_ri) {
          ri = interaction_state(t);
          have_ri = true;
        }
        r = &ri;
      }
      cplx v = 0.0;
      for (Eigen::Index c = 0; c < op.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(op, c); it; ++it) v += it.value() * (*r)(it.col(), it.row());
      }
      traj.observables[name].push_back(v.real());
    }
  };
  auto store = [&](double t) {
    DenseMatrix ri = interaction_state(t);
    if (!ri.allFinite()) fail_nonfinite(t, ri.norm());
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, (ri - ri.adjoint()).cwiseAbs().maxCoeff());
    if (spec.check_positivity) traj.min_eigenvalue = std::min(traj.min_eigenvalue, min_eigenvalue(ri));
    traj.times.push_back(t);
    traj.states.push_back(QuantumState::density_unchecked(space, prob.lift_density(ri)));
  };

  record(0.0);
  SparseMatrix hbuf;
  DenseMatrix dbuf;
  auto rhs = [&](double t, const DenseMatrix& y, DenseMatrix& out) {
    prob.hamiltonian_at(t, hbuf);
    if (prob.has_channels()) {
      prob.dissipator().apply(y, out);
    } else {
      out.setZero(y.rows(), y.cols());
    }
    dbuf.noalias() = hbuf * y;
    dbuf.noalias() -= y * hbuf;
    out.noalias() += cplx(0.0, -1.0) * dbuf;
  };

  switch (spec.integrator) {
    case Integrator::rk4: {
      const double dt = spec.dt > 0.0 ? spec.dt : default_rk4_step(h);
      std::array<DenseMatrix, 5> w;
      drive_fixed(prob.samples(), dt, [&](double t, double hs) { rk4_step(rhs, t, hs, rho, w); }, record, store,
                  traj.steps);
      break;
    }
    case Integrator::adaptive: {
      const double dt = spec.dt > 0.0 ? spec.dt : default_rk4_step(h);
      std::array<DenseMatrix, 7> k;
      DenseMatrix tmp;
      DenseMatrix y_new;
      drive_adaptive(
          prob.samples(), dt, spec.t_final,
          [&](double t, double hs) { return dp45_attempt(rhs, t, hs, rho, y_new, k, tmp, spec.rel_tol, spec.abs_tol); },
          [&] { rho = y_new; }, record, store, traj.steps);
      break;
    }
    case Integrator::split: {
      if (!prob.rotating()) throw std::invalid_argument("split integrator needs a rotating-form Hamiltonian");
      const double dt = spec.dt > 0.0 ? spec.dt : default_split_step(h);
      detail::SplitStepPropagator prop(prob.frame(), prob.static_part(), prob.block_offsets(), prob.dissipator());
      prop.activate_blocks_from(rho);
      drive_fixed(
          prob.samples(), dt,
          [&](double, double hs) {
            prop.set_step(hs);
            prop.step_density(rho);
          },
          record, store, traj.steps);
      break;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------

namespace {

int register_size(const std::map<std::string, cplx>& reg) {
  if (reg.empty()) throw std::invalid_argument("register state has no amplitudes");
  const auto n = reg.begin()->first.size();
  for (const auto& [bits, amp] : reg) {
    if (bits.size() != n) throw std::invalid_argument("register bit strings differ in length");
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("register keys must be bit strings");
    }
  }
  return static_cast<int>(n);
}

}  // namespace

OccupationAmplitudes analytic_effective_evolution(const std::map<std::string, cplx>& register_a,
                                                  const std::map<std::string, cplx>& register_b,
                                                  std::span<const double> lambdas, double t) {
  const int n = register_size(register_a);
  if (register_size(register_b) != n || lambdas.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("register sizes and coupling count must agree");
  }
  // Per-pair image of |n_a, n_b> as a list of ((n_a', n_b'), amplitude).
  using PairTerm = std::pair<std::pair<int, int>, cplx>;
  auto pair_image = [](int na, int nb, double lt) -> std::vector<PairTerm> {
    const double c = std::cos(lt);
    const double s = std::sin(lt);
    const cplx is(0.0, s);
    if (na == 0 && nb == 0) return {{{0, 0}, 1.0}};
    if (na == 1 && nb == 0) return {{{1, 0}, c}, {{0, 1}, is}};
    if (na == 0 && nb == 1) return {{{0, 1}, c}, {{1, 0}, is}};
    const cplx leak = is * c * std::sqrt(2.0);
    return {{{1, 1}, c * c - s * s}, {{2, 0}, leak}, {{0, 2}, leak}};
  };

  OccupationAmplitudes out;
  for (const auto& [xa, ca] : register_a) {
    for (const auto& [xb, cb] : register_b) {
      OccupationAmplitudes partial{{std::vector<int>(static_cast<std::size_t>(2 * n), 0), ca * cb}};
      for (int j = 0; j < n; ++j) {
        const auto terms = pair_image(xa[static_cast<std::size_t>(j)] - '0', xb[static_cast<std::size_t>(j)] - '0',
                                      lambdas[static_cast<std::size_t>(j)] * t);
        OccupationAmplitudes next;
        for (const auto& [occ, amp] : partial) {
          for (const auto& [po, pa] : terms) {
            auto o = occ;
            o[static_cast<std::size_t>(j)] = po.first;
            o[static_cast<std::size_t>(n + j)] = po.second;
            next[o] += amp * pa;
          }
        }
        partial = std::move(next);
      }
      for (const auto& [occ, amp] : partial) out[occ] += amp;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == cplx(0.0); });
  return out;
}

std::pair<std::map<std::string, cplx>, std::map<std::string, cplx>> analytic_swap(
    const std::map<std::string, cplx>& register_a, const std::map<std::string, cplx>& register_b,
    std::span<const double> lambdas) {
  const int n = register_size(register_a);
  if (register_size(register_b) != n || lambdas.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("register sizes and coupling count must agree");
  }
  const double ref = std::abs(lambdas[0]);
  if (ref == 0.0) throw std::invalid_argument("swap needs nonzero couplings");
  std::vector<cplx> phase(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double l = lambdas[static_cast<std::size_t>(j)];
    if (std::abs(std::abs(l) - ref) > 1e-12 * ref) {
      throw std::invalid_argument("swap form needs equal |lambda_j| across pairs");
    }
    phase[static_cast<std::size_t>(j)] = l > 0 ? cplx(0.0, 1.0) : cplx(0.0, -1.0);  // i^(lambda_j / lambda)
  }
  auto decorate = [&](const std::map<std::string, cplx>& reg) {
    std::map<std::string, cplx> out;
    for (const auto& [bits, amp] : reg) {
      cplx a = amp;
      for (int j = 0; j < n; ++j) {
        if (bits[static_cast<std::size_t>(j)] == '1') a *= phase[static_cast<std::size_t>(j)];
      }
      out[bits] = a;
    }
    return out;
  };
  return {decorate(register_b), decorate(register_a)};
}

double verify_heisenberg_transform(double lambda, double t, int fock_levels) {
  if (fock_levels < 3) throw std::invalid_argument("need at least three Fock levels");
  const SpaceDescriptor space = make_space(1, fock_levels);
  const std::vector<double> lam{lambda};
  const DenseMatrix he = build_swap_hamiltonian(lam, space).dense();
  const DenseMatrix u = (cplx(0.0, -t) * he).exp();
  const DenseMatrix ad = mode_annihilator(space, space.mode_a(0)).dagger().dense();
  const DenseMatrix bd = mode_annihilator(space, space.mode_b(0)).dagger().dense();
  const DenseMatrix lhs = u * ad * u.adjoint();
  const DenseMatrix rhs = std::cos(lambda * t) * ad + cplx(0.0, std::sin(lambda * t)) * bd;
  // Columns whose photon number n_a + n_b <= fock_levels - 2: the truncation
  // holds the whole sector and its image under a+.
  double worst = 0.0;
  for (std::size_t c = 0; c < space.total_dim(); ++c) {
    const auto d = space.digits(c);
    if (d[0] + d[1] > fock_levels - 2) continue;
    const auto col = static_cast<Eigen::Index>(c);
    worst = std::max(worst, (lhs.col(col) - rhs.col(col)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace qswap
