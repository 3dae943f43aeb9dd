#include "qswap/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qswap {

using nlohmann::json;

namespace {

constexpr double kGHz = kTwoPi * 1e9;
constexpr double kMHz = kTwoPi * 1e6;

double rate_from_lifetime(const std::optional<double>& us, const char* what) {
  if (!us) return 0.0;
  if (!(*us > 0.0) || !std::isfinite(*us)) throw ConfigError(std::string(what) + " lifetime must be > 0 us");
  return 1.0 / (*us * 1e-6);
}

}  // namespace

DeviceParams DeviceConfig::to_params() const {
  const auto n = omega_a_ghz.size();
  for (std::size_t s : {omega_b_ghz.size(), g_mhz.size(), mu_mhz.size(), kappa_a_inv_us.size(), kappa_b_inv_us.size()}) {
    if (s != n) throw ConfigError("per-pair device lists must all have the same length");
  }
  DeviceParams p;
  p.omega_c = omega_c_ghz * kGHz;
  for (std::size_t j = 0; j < n; ++j) {
    p.omega_a.push_back(omega_a_ghz[j] * kGHz);
    p.omega_b.push_back(omega_b_ghz[j] * kGHz);
    p.g.push_back(g_mhz[j] * kMHz);
    p.mu.push_back(mu_mhz[j] * kMHz);
    p.kappa_a.push_back(rate_from_lifetime(kappa_a_inv_us[j], "resonator"));
    p.kappa_b.push_back(rate_from_lifetime(kappa_b_inv_us[j], "resonator"));
  }
  p.gamma = rate_from_lifetime(gamma_inv_us, "coupler relaxation");
  p.gamma_phi = rate_from_lifetime(gamma_phi_inv_us, "coupler dephasing");
  p.pairing = pairing;
  p.validate();
  return p;
}

std::vector<double> AlphaGrid::values() const {
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) {
    out.push_back(i == steps - 1 ? max : min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return out;
}

std::string to_string(Task task) { return task == Task::transfer ? "transfer" : "exchange"; }

Task task_from_string(const std::string& name) {
  if (name == "transfer") return Task::transfer;
  if (name == "exchange") return Task::exchange;
  throw ConfigError("unknown task '" + name + "' (expected transfer or exchange)");
}

void SweepConfig::validate() const {
  (void)device.to_params();
  if (!(alpha_grid.min >= 1.0)) throw ConfigError("alpha_grid.min must be >= 1");
  if (alpha_grid.steps < 2) throw ConfigError("alpha_grid.steps must be >= 2");
  if (!(alpha_grid.max >= alpha_grid.min)) throw ConfigError("alpha_grid.max must be >= alpha_grid.min");
  if (alpha && !(*alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(crosstalk >= 0.0)) throw ConfigError("crosstalk fraction must be >= 0");
  if (fock_levels < 2) throw ConfigError("fock_levels must be >= 2");
  if (!(dt_ps >= 0.0)) throw ConfigError("dt_ps must be >= 0");
  if (!(isolation_margin > 0.0)) throw ConfigError("isolation_margin must be > 0");
  if (state_pairs.empty()) throw ConfigError("state_pairs must not be empty");
  for (const auto& [a, b] : state_pairs) {
    try {
      make_named_state(a, device.n_pairs());
      make_named_state(b, device.n_pairs());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("state pair " + a + "/" + b + ": " + e.what());
    }
  }
}

ProtocolOptions SweepConfig::protocol_options() const {
  ProtocolOptions o;
  o.method = method;
  o.crosstalk = crosstalk > 0.0;
  o.fock_levels = fock_levels;
  o.integrator = integrator;
  o.dt = dt_ps * 1e-12;
  o.isolation_margin = isolation_margin;
  return o;
}

DeviceParams SweepConfig::device_params() const {
  DeviceParams p = device.to_params();
  if (alpha) p = apply_alpha(p, *alpha);
  set_uniform_crosstalk(p, crosstalk);
  return p;
}

DeviceParams apply_alpha(const DeviceParams& base, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
  DeviceParams p = base;
  const double d1 = alpha * base.g.at(0);
  const double lambda = base.g[0] * base.mu[0] / d1;
  const double sign0 = base.delta_a(0) < 0.0 ? -1.0 : 1.0;
  for (int j = 0; j < base.n_pairs(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    const double sign = j % 2 == 0 ? sign0 : -sign0;
    const double delta = sign * base.g[js] * base.mu[js] / lambda;
    p.omega_a[js] = base.omega_c - delta;
    p.omega_b[js] = base.omega_c - delta;
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

namespace {

DeviceConfig table1(double f1, double f2) {
  DeviceConfig d;
  d.omega_c_ghz = 6.0;
  d.omega_a_ghz = {f1, f2};
  d.omega_b_ghz = {f1, f2};
  d.g_mhz = {100.0, 100.0};
  d.mu_mhz = {100.0, 100.0};
  d.kappa_a_inv_us = {1.0, 1.0};
  d.kappa_b_inv_us = {1.0, 1.0};
  d.gamma_inv_us = 3.0;
  d.gamma_phi_inv_us = 3.0;
  return d;
}

struct PresetInfo {
  const char* name;
  const char* title;
  double alpha;
  Task task;
  double f1;
  double f2;
};

constexpr PresetInfo kPresets[] = {
    {"table1-transfer", "Bell-state transfer", 5.5, Task::transfer, 5.45, 6.55},
    {"table1-exchange", "Bell-state exchange", 9.3, Task::exchange, 5.07, 6.93},
};

const PresetInfo& find_preset(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string quality_factor(double f_ghz, double lifetime_us) {
  const double q = kTwoPi * f_ghz * 1e9 * lifetime_us * 1e-6;
  const int e = static_cast<int>(std::floor(std::log10(q)));
  return fmt("%.1f", q / std::pow(10.0, e)) + " x 10^" + std::to_string(e);
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

DeviceConfig preset_device(const std::string& name) {
  const auto& p = find_preset(name);
  return table1(p.f1, p.f2);
}

std::vector<std::pair<std::string, std::string>> default_state_pairs(Task task) {
  if (task == Task::transfer) {
    return {{"bell_psi_plus", "vacuum"},
            {"bell_psi_minus", "vacuum"},
            {"bell_phi_plus", "vacuum"},
            {"bell_phi_minus", "vacuum"}};
  }
  return {{"bell_psi_plus", "bell_psi_minus"},
          {"bell_phi_plus", "bell_phi_minus"},
          {"bell_phi_plus", "bell_psi_plus"},
          {"bell_phi_plus", "bell_psi_minus"}};
}

SweepConfig preset_config(const std::string& name) {
  const auto& p = find_preset(name);
  SweepConfig c;
  c.preset = name;
  c.device = table1(p.f1, p.f2);
  c.task = p.task;
  c.state_pairs = default_state_pairs(p.task);
  return c;
}

std::string render_preset(const std::string& name) {
  const auto& p = find_preset(name);
  const DeviceConfig d = table1(p.f1, p.f2);
  std::ostringstream os;
  os << name << ": " << p.title << " (alpha = " << fmt("%.1f", p.alpha) << ")\n";
  auto row = [&](const std::string& label, const std::string& symbol, const std::string& value) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-34s %-30s %s\n", label.c_str(), symbol.c_str(), value.c_str());
    os << buf;
  };
  row("Resonator photon lifetime", "1/kappa_a1, 1/kappa_b1, 1/kappa_a2, 1/kappa_b2", fmt("%g us", *d.kappa_a_inv_us[0]));
  row("Coupler energy relaxation time", "1/gamma", fmt("%g us", *d.gamma_inv_us));
  row("Coupler dephasing time", "1/gamma_phi", fmt("%g us", *d.gamma_phi_inv_us));
  row("Coupler frequency", "omega_c/2pi", fmt("%.1f GHz", d.omega_c_ghz));
  row("Resonator frequency, pair I", "omega_a1/2pi, omega_b1/2pi", fmt("%.2f GHz", d.omega_a_ghz[0]));
  row("Resonator frequency, pair II", "omega_a2/2pi, omega_b2/2pi", fmt("%.2f GHz", d.omega_a_ghz[1]));
  row("Resonator quality factor, pair I", "Q_a1, Q_b1", quality_factor(d.omega_a_ghz[0], *d.kappa_a_inv_us[0]));
  row("Resonator quality factor, pair II", "Q_a2, Q_b2", quality_factor(d.omega_a_ghz[1], *d.kappa_a_inv_us[1]));
  row("Coupling strength", "g_j/2pi = mu_j/2pi", fmt("%g MHz", d.g_mhz[0]));
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

std::vector<std::optional<double>> get_lifetimes(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("field '" + key + "' must be an array");
  std::vector<std::optional<double>> out;
  for (const auto& x : j) {
    if (x.is_null()) {
      out.emplace_back();
    } else {
      out.emplace_back(get_as<double>(x, key));
    }
  }
  return out;
}

std::optional<double> get_lifetime(const json& j, const std::string& key) {
  if (j.is_null()) return std::nullopt;
  return get_as<double>(j, key);
}

void merge_device(DeviceConfig& d, const json& j) {
  if (!j.is_object()) throw ConfigError("'device' must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "omega_c_ghz") d.omega_c_ghz = get_as<double>(v, key);
    else if (key == "omega_a_ghz") d.omega_a_ghz = get_as<std::vector<double>>(v, key);
    else if (key == "omega_b_ghz") d.omega_b_ghz = get_as<std::vector<double>>(v, key);
    else if (key == "g_mhz") d.g_mhz = get_as<std::vector<double>>(v, key);
    else if (key == "mu_mhz") d.mu_mhz = get_as<std::vector<double>>(v, key);
    else if (key == "kappa_a_inv_us") d.kappa_a_inv_us = get_lifetimes(v, key);
    else if (key == "kappa_b_inv_us") d.kappa_b_inv_us = get_lifetimes(v, key);
    else if (key == "gamma_inv_us") d.gamma_inv_us = get_lifetime(v, key);
    else if (key == "gamma_phi_inv_us") d.gamma_phi_inv_us = get_lifetime(v, key);
    else if (key == "pairing") d.pairing = get_as<std::vector<int>>(v, key);
    else throw ConfigError("unknown device field '" + key + "'");
  }
}

json lifetimes_json(const std::vector<std::optional<double>>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
  return out;
}

}  // namespace

SweepConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  SweepConfig c;
  bool have_task = false;
  bool have_pairs = false;
  if (root.contains("preset")) {
    c = preset_config(get_as<std::string>(root["preset"], "preset"));
    have_task = true;
    have_pairs = true;
  }
  for (const auto& [key, v] : root.items()) {
    if (key == "preset") {
      continue;
    } else if (key == "device") {
      merge_device(c.device, v);
    } else if (key == "alpha_grid") {
      if (!v.is_object()) throw ConfigError("'alpha_grid' must be an object");
      for (const auto& [gk, gv] : v.items()) {
        if (gk == "min") c.alpha_grid.min = get_as<double>(gv, "alpha_grid.min");
        else if (gk == "max") c.alpha_grid.max = get_as<double>(gv, "alpha_grid.max");
        else if (gk == "steps") c.alpha_grid.steps = get_as<int>(gv, "alpha_grid.steps");
        else throw ConfigError("unknown alpha_grid field '" + gk + "'");
      }
    } else if (key == "alpha") {
      c.alpha = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
    } else if (key == "task") {
      c.task = task_from_string(get_as<std::string>(v, key));
      have_task = true;
    } else if (key == "state_pairs") {
      c.state_pairs.clear();
      if (!v.is_array()) throw ConfigError("'state_pairs' must be an array");
      for (const auto& p : v) {
        const auto pair = get_as<std::vector<std::string>>(p, key);
        if (pair.size() != 2) throw ConfigError("each state pair must list exactly two state kinds");
        c.state_pairs.emplace_back(pair[0], pair[1]);
      }
      have_pairs = true;
    } else if (key == "method") {
      c.method = method_from_string(get_as<std::string>(v, key));
    } else if (key == "crosstalk") {
      c.crosstalk = v.is_null() ? 0.0 : get_as<double>(v, key);
    } else if (key == "fock_levels") {
      c.fock_levels = get_as<int>(v, key);
    } else if (key == "integrator") {
      c.integrator = integrator_from_string(get_as<std::string>(v, key));
    } else if (key == "dt_ps") {
      c.dt_ps = get_as<double>(v, key);
    } else if (key == "isolation_margin") {
      c.isolation_margin = get_as<double>(v, key);
    } else if (key == "output") {
      c.output = get_as<std::string>(v, key);
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  if (!have_task && !have_pairs) throw ConfigError("config needs a preset, a task or explicit state_pairs");
  if (!have_pairs) c.state_pairs = default_state_pairs(c.task);
  c.validate();
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const SweepConfig& c) {
  json root;
  if (!c.preset.empty()) root["preset"] = c.preset;
  json d;
  d["omega_c_ghz"] = c.device.omega_c_ghz;
  d["omega_a_ghz"] = c.device.omega_a_ghz;
  d["omega_b_ghz"] = c.device.omega_b_ghz;
  d["g_mhz"] = c.device.g_mhz;
  d["mu_mhz"] = c.device.mu_mhz;
  d["kappa_a_inv_us"] = lifetimes_json(c.device.kappa_a_inv_us);
  d["kappa_b_inv_us"] = lifetimes_json(c.device.kappa_b_inv_us);
  d["gamma_inv_us"] = c.device.gamma_inv_us ? json(*c.device.gamma_inv_us) : json(nullptr);
  d["gamma_phi_inv_us"] = c.device.gamma_phi_inv_us ? json(*c.device.gamma_phi_inv_us) : json(nullptr);
  d["pairing"] = c.device.pairing;
  root["device"] = d;
  root["alpha_grid"] = {{"min", c.alpha_grid.min}, {"max", c.alpha_grid.max}, {"steps", c.alpha_grid.steps}};
  root["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  root["task"] = to_string(c.task);
  json pairs = json::array();
  for (const auto& [a, b] : c.state_pairs) pairs.push_back({a, b});
  root["state_pairs"] = pairs;
  root["method"] = to_string(c.method);
  root["crosstalk"] = c.crosstalk;
  root["fock_levels"] = c.fock_levels;
  root["integrator"] = to_string(c.integrator);
  root["dt_ps"] = c.dt_ps;
  root["isolation_margin"] = c.isolation_margin;
  root["output"] = c.output;
  return root.dump(2) + "\n";
}

}  // namespace qswap
