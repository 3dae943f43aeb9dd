#pragma once

// JSON configuration with unit-suffixed fields, and the built-in device presets.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qswap/model.hpp"
#include "qswap/protocol.hpp"

namespace qswap {

/// Device parameters in file units: frequencies and couplings as f = omega/2pi
/// in GHz/MHz, lifetimes in microseconds. A missing lifetime means no loss.
struct DeviceConfig {
  double omega_c_ghz = 0.0;
  std::vector<double> omega_a_ghz;
  std::vector<double> omega_b_ghz;
  std::vector<double> g_mhz;
  std::vector<double> mu_mhz;
  std::vector<std::optional<double>> kappa_a_inv_us;
  std::vector<std::optional<double>> kappa_b_inv_us;
  std::optional<double> gamma_inv_us;
  std::optional<double> gamma_phi_inv_us;
  std::vector<int> pairing;

  int n_pairs() const noexcept { return static_cast<int>(omega_a_ghz.size()); }
  /// Converts to angular units (rad/s). Throws ConfigError on bad values.
  DeviceParams to_params() const;
  bool operator==(const DeviceConfig&) const = default;
};

struct AlphaGrid {
  double min = 4.0;
  double max = 10.0;
  int steps = 61;

  std::vector<double> values() const;
  bool operator==(const AlphaGrid&) const = default;
};

enum class Task { transfer, exchange };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct SweepConfig {
  /// Name of the preset the device came from; informational once resolved.
  std::string preset;
  DeviceConfig device;
  AlphaGrid alpha_grid;
  /// Detuning ratio for single runs; empty keeps the device frequencies as given.
  std::optional<double> alpha;
  Task task = Task::transfer;
  std::vector<std::pair<std::string, std::string>> state_pairs;
  Method method = Method::full_lindblad;
  /// Uniform direct crosstalk as a fraction of g_1; 0 disables it.
  double crosstalk = 0.0;
  int fock_levels = 3;
  Integrator integrator = Integrator::split;
  double dt_ps = 0.0;
  double isolation_margin = kDefaultIsolationMargin;
  std::string output;

  bool operator==(const SweepConfig&) const = default;

  /// Throws ConfigError on violated invariants.
  void validate() const;
  ProtocolOptions protocol_options() const;
  /// Device at the configured alpha (or as given) with crosstalk applied.
  DeviceParams device_params() const;
};

/// Device with Delta_1 = alpha g_1 and the remaining pairs detuned with
/// alternating sign so that every |lambda_j| equals g_1 mu_1 / Delta_1.
/// Resonator frequencies are placed at omega_c - Delta_j.
DeviceParams apply_alpha(const DeviceParams& base, double alpha);

std::vector<std::string> preset_names();
DeviceConfig preset_device(const std::string& name);
/// A complete config for the preset: its device, the task it was designed
/// for and the matching Bell-state pairs.
SweepConfig preset_config(const std::string& name);
/// Human-readable table of a preset, quality factors included.
std::string render_preset(const std::string& name);

std::vector<std::pair<std::string, std::string>> default_state_pairs(Task task);

SweepConfig parse_config(const std::string& json_text);
SweepConfig load_config(const std::string& path);
std::string emit_config(const SweepConfig& config);

}  // namespace qswap
