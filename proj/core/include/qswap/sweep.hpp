#pragma once

// Fidelity-versus-detuning sweeps and their CSV form.

#include <map>
#include <string>
#include <vector>

#include "qswap/config.hpp"

namespace qswap {

struct SweepRow {
  double alpha = 0.0;
  std::string state_pair;
  double fidelity = 0.0;
  double avg_pe = 0.0;
  double swap_time_ns = 0.0;
  /// Empty on success; the row's numbers are NaN otherwise.
  std::string error;
  ProtocolDiagnostics diagnostics;
  bool isolation_pass = false;
};

struct SweepPeak {
  double alpha = 0.0;
  double fidelity = 0.0;
};

struct SweepResult {
  /// Sorted by alpha, then by the order of state_pairs in the config.
  std::vector<SweepRow> rows;
  /// Per state-pair label; the lowest alpha wins ties.
  std::map<std::string, SweepPeak> peaks;
};

std::string state_pair_label(const std::string& a, const std::string& b);

/// Worker count from SIM_THREADS, falling back to the hardware concurrency.
unsigned sweep_threads();

SweepResult run_sweep(const SweepConfig& config);
SweepResult run_sweep(const SweepConfig& config, unsigned threads);

/// Pass/fail table of the isolation conditions for the configured device.
std::string check_conditions(const SweepConfig& config);
std::string render_isolation(const IsolationReport& report);

std::string format_number(double x);
std::string csv_text(const SweepResult& result);
/// Throws std::runtime_error naming the path when the file cannot be written.
void emit_csv(const SweepResult& result, const std::string& path);

}  // namespace qswap
