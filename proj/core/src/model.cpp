#include "qswap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace qswap {

namespace {

Operator raising(const SpaceDescriptor& space) { return coupler_sigma(space).dagger(); }

void require_match(const DeviceParams& params, const SpaceDescriptor& space) {
  if (params.n_pairs() != space.n_pairs()) {
    throw std::invalid_argument("device parameters and space disagree on the number of pairs");
  }
}

}  // namespace

int DeviceParams::partner_b(int j) const {
  if (j < 0 || j >= n_pairs()) throw std::out_of_range("pair index out of range");
  return pairing.empty() ? j : pairing[static_cast<std::size_t>(j)];
}

int DeviceParams::pair_of_b(int k) const {
  for (int j = 0; j < n_pairs(); ++j) {
    if (partner_b(j) == k) return j;
  }
  throw std::out_of_range("no pair owns the requested B mode");
}

double DeviceParams::slot_frequency(int slot) const {
  const int n = n_pairs();
  if (slot < 0 || slot >= 2 * n) throw std::out_of_range("slot is not a bosonic mode");
  if (slot < n) return omega_a[static_cast<std::size_t>(slot)];
  return omega_b[static_cast<std::size_t>(pair_of_b(slot - n))];
}

double DeviceParams::slot_decay_rate(int slot) const {
  const int n = n_pairs();
  if (slot < 0 || slot >= 2 * n) throw std::out_of_range("slot is not a bosonic mode");
  if (slot < n) return kappa_a[static_cast<std::size_t>(slot)];
  return kappa_b[static_cast<std::size_t>(pair_of_b(slot - n))];
}

bool DeviceParams::has_dissipation() const {
  auto positive = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  return gamma > 0.0 || gamma_phi > 0.0 || positive(kappa_a) || positive(kappa_b);
}

void DeviceParams::validate() const {
  const auto n = omega_a.size();
  if (n == 0) throw ConfigError("device needs at least one pair");
  for (const auto* v : {&omega_b, &g, &mu, &kappa_a, &kappa_b}) {
    if (v->size() != n) throw ConfigError("per-pair parameter lists must all have length n_pairs");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(omega_c) || !finite(gamma) || !finite(gamma_phi)) throw ConfigError("non-finite device parameter");
  if (gamma < 0.0 || gamma_phi < 0.0) throw ConfigError("coupler rates must be >= 0");
  for (std::size_t j = 0; j < n; ++j) {
    for (double x : {omega_a[j], omega_b[j], g[j], mu[j], kappa_a[j], kappa_b[j]}) {
      if (!finite(x)) throw ConfigError("non-finite device parameter");
    }
    if (kappa_a[j] < 0.0 || kappa_b[j] < 0.0) throw ConfigError("resonator decay rates must be >= 0");
    if (g[j] == 0.0 || mu[j] == 0.0) throw ConfigError("couplings of active pairs must be nonzero");
    if (delta_a(static_cast<int>(j)) == 0.0 || delta_b(static_cast<int>(j)) == 0.0) {
      throw ConfigError("pair " + std::to_string(j + 1) + " is resonant with the coupler (zero detuning)");
    }
  }
  if (!pairing.empty()) {
    if (pairing.size() != n) throw ConfigError("pairing must list one B mode per pair");
    std::set<int> seen(pairing.begin(), pairing.end());
    if (seen.size() != n || *seen.begin() != 0 || *seen.rbegin() != static_cast<int>(n) - 1) {
      throw ConfigError("pairing must be a permutation of 0..N-1");
    }
  }
  for (const auto& [key, value] : crosstalk) {
    const auto [p, q] = key;
    if (p < 0 || q < 0 || p >= 2 * static_cast<int>(n) || q >= 2 * static_cast<int>(n) || p >= q) {
      throw ConfigError("crosstalk entry references an unknown mode pair");
    }
    if (!finite(value)) throw ConfigError("non-finite crosstalk coupling");
  }
}

std::pair<int, int> crosstalk_key(int slot_p, int slot_q) {
  if (slot_p == slot_q) throw std::invalid_argument("crosstalk needs two distinct modes");
  return {std::min(slot_p, slot_q), std::max(slot_p, slot_q)};
}

void set_uniform_crosstalk(DeviceParams& params, double fraction) {
  if (fraction < 0.0) throw ConfigError("crosstalk fraction must be >= 0");
  params.crosstalk.clear();
  if (fraction == 0.0) return;
  const double value = fraction * params.g.at(0);
  const int modes = 2 * params.n_pairs();
  for (int p = 0; p < modes; ++p) {
    for (int q = p + 1; q < modes; ++q) params.crosstalk[{p, q}] = value;
  }
}

// ---------------------------------------------------------------------------

IsolationReport check_isolation(const DeviceParams& params, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("isolation margin must be positive");
  IsolationReport rep;
  rep.margin_factor = margin;
  const int n = params.n_pairs();
  double worst = std::numeric_limits<double>::infinity();

  for (int j = 0; j < n; ++j) {
    const auto js = static_cast<std::size_t>(j);
    for (char m : {'a', 'b'}) {
      DispersiveEntry e;
      e.pair = j;
      e.mode = m;
      e.detuning = m == 'a' ? params.delta_a(j) : params.delta_b(j);
      e.coupling = m == 'a' ? params.g[js] : params.mu[js];
      if (e.detuning == 0.0) {
        rep.errors.push_back("pair " + std::to_string(j + 1) + " mode " + m + ": zero detuning");
        e.ratio = 0.0;
      } else {
        e.ratio = std::abs(e.detuning) / std::abs(e.coupling);
      }
      e.ok = e.detuning != 0.0 && e.ratio >= margin;
      worst = std::min(worst, e.ratio);
      rep.dispersive.push_back(e);
    }
  }

  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const auto js = static_cast<std::size_t>(j);
      const auto ks = static_cast<std::size_t>(k);
      const double coupling = std::max({std::abs(params.g[js] * params.g[ks]),
                                        std::abs(params.g[js] * params.mu[ks]),
                                        std::abs(params.mu[js] * params.mu[ks])});
      std::set<std::pair<double, double>> seen;
      for (char mj : {'a', 'b'}) {
        for (char mk : {'a', 'b'}) {
          const double dj = mj == 'a' ? params.delta_a(j) : params.delta_b(j);
          const double dk = mk == 'a' ? params.delta_a(k) : params.delta_b(k);
          if (!seen.insert({dj, dk}).second) continue;
          CrossPairEntry e;
          e.j = j;
          e.k = k;
          e.mode_j = mj;
          e.mode_k = mk;
          e.coupling = coupling;
          if (dj == 0.0 || dk == 0.0) {
            e.ratio = 0.0;
            e.margin = 0.0;
            e.ok = false;
          } else {
            const double num = std::abs(dj - dk);
            const double den = std::abs(1.0 / dj + 1.0 / dk);
            if (num == 0.0) {
              e.ratio = 0.0;
            } else if (den == 0.0) {
              e.ratio = std::numeric_limits<double>::infinity();
            } else {
              e.ratio = num / den;
            }
            e.margin = e.ratio / coupling;
            e.ok = e.margin >= margin;
          }
          worst = std::min(worst, e.margin);
          rep.cross.push_back(e);
        }
      }
    }
  }

  rep.worst_margin = worst;
  const bool all_ok = std::all_of(rep.dispersive.begin(), rep.dispersive.end(), [](const auto& e) { return e.ok; }) &&
                      std::all_of(rep.cross.begin(), rep.cross.end(), [](const auto& e) { return e.ok; });
  rep.pass = rep.errors.empty() && all_ok;
  return rep;
}

// ---------------------------------------------------------------------------

double lambda_equal_detuning(double g, double mu, double delta) {
  if (delta == 0.0) throw std::invalid_argument("zero detuning");
  return g * mu / delta;
}

double lambda_general(double g, double mu, double delta_a, double delta_b) {
  if (delta_a == 0.0 || delta_b == 0.0) throw std::invalid_argument("zero detuning");
  if (delta_a == delta_b) return lambda_equal_detuning(g, mu, delta_a);
  return 0.5 * g * mu * (1.0 / delta_a + 1.0 / delta_b);
}

EffectiveParams compute_effective_params(const DeviceParams& params) {
  const int n = params.n_pairs();
  EffectiveParams eff;
  for (int j = 0; j < n; ++j) {
    const auto js = static_cast<std::size_t>(j);
    const double da = params.delta_a(j);
    const double db = params.delta_b(j);
    eff.lambda.push_back(lambda_general(params.g[js], params.mu[js], da, db));
    eff.stark_a.push_back(params.g[js] * params.g[js] / da);
    eff.stark_b.push_back(params.mu[js] * params.mu[js] / db);
  }
  eff.lambda_ref = std::abs(eff.lambda.at(0));
  if (eff.lambda_ref == 0.0) throw std::invalid_argument("effective coupling of pair 1 vanishes");
  eff.uniform = std::all_of(eff.lambda.begin(), eff.lambda.end(), [&](double l) {
    return std::abs(std::abs(l) - eff.lambda_ref) <= 1e-9 * eff.lambda_ref;
  });
  for (int j = 0; j < n; ++j) {
    const auto js = static_cast<std::size_t>(j);
    eff.phi.push_back((eff.lambda[js] + eff.stark_a[js]) / (2.0 * eff.lambda_ref));
    eff.theta.push_back((eff.lambda[js] + eff.stark_b[js]) / (2.0 * eff.lambda_ref));
  }
  return eff;
}

// ---------------------------------------------------------------------------

RealVector frame_energies(const DeviceParams& params, const SpaceDescriptor& space) {
  require_match(params, space);
  const auto dim = space.total_dim();
  RealVector r = RealVector::Zero(static_cast<Eigen::Index>(dim));
  const int modes = 2 * space.n_pairs();
  std::vector<double> shift(static_cast<std::size_t>(modes));
  for (int p = 0; p < modes; ++p) shift[static_cast<std::size_t>(p)] = params.slot_frequency(p) - params.omega_c;
  for (std::size_t i = 0; i < dim; ++i) {
    const auto d = space.digits(i);
    double e = 0.0;
    for (int p = 0; p < modes; ++p) e += shift[static_cast<std::size_t>(p)] * d[static_cast<std::size_t>(p)];
    r(static_cast<Eigen::Index>(i)) = e;
  }
  return r;
}

namespace {

Operator coupling_part(const DeviceParams& params, const SpaceDescriptor& space) {
  const Operator sp = raising(space);
  Operator v = Operator::zero(space);
  for (int j = 0; j < space.n_pairs(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    v += cplx(params.g[js]) * (mode_annihilator(space, space.mode_a(j)) * sp);
    v += cplx(params.mu[js]) * (mode_annihilator(space, space.mode_b(params.partner_b(j))) * sp);
  }
  return v + v.dagger();
}

Operator crosstalk_part(const DeviceParams& params, const SpaceDescriptor& space) {
  Operator x = Operator::zero(space);
  for (const auto& [key, value] : params.crosstalk) {
    const auto [p, q] = key;
    if (!space.is_bosonic(p) || !space.is_bosonic(q)) {
      throw std::invalid_argument("crosstalk key references an unknown mode");
    }
    if (value == 0.0) continue;
    x += cplx(value) * (mode_annihilator(space, p) * mode_annihilator(space, q).dagger());
  }
  return x + x.dagger();
}

}  // namespace

TimeDependentHamiltonian interaction_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space,
                                                 bool with_crosstalk) {
  require_match(params, space);
  Operator s = coupling_part(params, space);
  if (with_crosstalk) s += crosstalk_part(params, space);
  return TimeDependentHamiltonian::rotating(frame_energies(params, space), std::move(s));
}

Operator build_interaction_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space, double t) {
  return interaction_hamiltonian(params, space, false).at(t);
}

Operator build_crosstalk_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space, double t) {
  return interaction_hamiltonian(params, space, true).at(t);
}

EffectiveHamiltonians build_effective_hamiltonians(const DeviceParams& params, const SpaceDescriptor& space,
                                                   double t) {
  require_match(params, space);
  const EffectiveParams eff = compute_effective_params(params);
  const Operator pe = coupler_projector(space, 1);
  const Operator pg = coupler_projector(space, 0);
  const Operator sz = coupler_sigma_z(space);
  Operator excited = Operator::zero(space);
  Operator ground = Operator::zero(space);
  Operator exchange = Operator::zero(space);
  for (int j = 0; j < space.n_pairs(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    const Operator a = mode_annihilator(space, space.mode_a(j));
    const Operator b = mode_annihilator(space, space.mode_b(params.partner_b(j)));
    const Operator ad = a.dagger();
    const Operator bd = b.dagger();
    excited += cplx(eff.stark_a[js]) * (a * ad) + cplx(eff.stark_b[js]) * (b * bd);
    ground += cplx(eff.stark_a[js]) * (ad * a) + cplx(eff.stark_b[js]) * (bd * b);
    const cplx phase = std::polar(1.0, (params.delta_a(j) - params.delta_b(j)) * t);
    Operator term = (phase * eff.lambda[js]) * (a * bd);
    exchange += term + term.dagger();
  }
  Operator h0 = excited * pe - ground * pg;
  Operator hint = exchange * sz;
  return {std::move(h0), std::move(hint)};
}

TimeDependentHamiltonian effective_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space) {
  auto parts = build_effective_hamiltonians(params, space, 0.0);
  return TimeDependentHamiltonian::rotating(frame_energies(params, space), parts.h0 + parts.hint);
}

Operator build_swap_hamiltonian(std::span<const double> lambdas, const SpaceDescriptor& space,
                                std::span<const int> pairing) {
  if (lambdas.size() != static_cast<std::size_t>(space.n_pairs())) {
    throw std::invalid_argument("one coupling per pair required");
  }
  if (!pairing.empty() && pairing.size() != lambdas.size()) throw std::invalid_argument("pairing size mismatch");
  Operator h = Operator::zero(space);
  for (int j = 0; j < space.n_pairs(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    if (lambdas[js] == 0.0) continue;
    const int k = pairing.empty() ? j : pairing[js];
    const Operator a = mode_annihilator(space, space.mode_a(j));
    const Operator b = mode_annihilator(space, space.mode_b(k));
    Operator term = cplx(-lambdas[js]) * (a * b.dagger());
    h += term + term.dagger();
  }
  return h;
}

Operator build_swap_hamiltonian(const DeviceParams& params, const SpaceDescriptor& space) {
  require_match(params, space);
  const auto eff = compute_effective_params(params);
  std::vector<int> pairing(static_cast<std::size_t>(params.n_pairs()));
  for (int j = 0; j < params.n_pairs(); ++j) pairing[static_cast<std::size_t>(j)] = params.partner_b(j);
  return build_swap_hamiltonian(eff.lambda, space, pairing);
}

// ---------------------------------------------------------------------------

double solve_detuning_matching(double g, double mu, double delta_a, MatchingRoot root) {
  if (delta_a == 0.0) throw std::invalid_argument("delta_a must be nonzero");
  const double d2 = delta_a * delta_a;
  const double s = d2 + g * g;
  const double disc = s * s - 4.0 * d2 * mu * mu;
  if (disc < 0.0 || !std::isfinite(disc)) {
    std::ostringstream os;
    os << "no real detuning matching exists (discriminant " << disc << " < 0)";
    throw std::domain_error(os.str());
  }
  double plus = 0.0;
  if (std::abs(g) == std::abs(mu)) {
    plus = delta_a;
  } else {
    plus = (s + std::sqrt(disc)) / (2.0 * delta_a);
  }
  if (root == MatchingRoot::plus) return plus;
  // Product of the two roots is mu^2.
  if (plus == 0.0) throw std::domain_error("degenerate matching root");
  return mu * mu / plus;
}

double detuning_matching_residual(double g, double mu, double delta_a, double delta_b) {
  const double t1 = g * g / delta_a;
  const double t2 = mu * mu / delta_b;
  const double lhs = t1 - t2;
  const double rhs = -(delta_a - delta_b);
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(delta_a), std::abs(delta_b)});
  return std::abs(lhs - rhs) / scale;
}

}  // namespace qswap
