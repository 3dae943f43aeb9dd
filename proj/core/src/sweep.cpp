#include "qswap/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace qswap {

std::string state_pair_label(const std::string& a, const std::string& b) { return a + ":" + b; }

unsigned sweep_threads() {
  if (const char* env = std::getenv("SIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    throw ConfigError(std::string("SIM_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepConfig& config) { return run_sweep(config, sweep_threads()); }

SweepResult run_sweep(const SweepConfig& config, unsigned threads) {
  config.validate();
  const DeviceParams base = config.device.to_params();
  const auto alphas = config.alpha_grid.values();
  const auto& pairs = config.state_pairs;
  const ProtocolOptions opts = config.protocol_options();
  const int n = base.n_pairs();

  SweepResult result;
  result.rows.resize(alphas.size() * pairs.size());
  auto run_one = [&](std::size_t idx) {
    const double alpha = alphas[idx / pairs.size()];
    const auto& [ka, kb] = pairs[idx % pairs.size()];
    SweepRow& row = result.rows[idx];
    row.alpha = alpha;
    row.state_pair = state_pair_label(ka, kb);
    try {
      DeviceParams p = apply_alpha(base, alpha);
      set_uniform_crosstalk(p, config.crosstalk);
      const ProtocolResult r = run_protocol(p, make_named_state(ka, n), make_named_state(kb, n), opts);
      row.fidelity = r.fidelity;
      row.avg_pe = r.avg_coupler_excitation;
      row.swap_time_ns = r.swap_time * 1e9;
      row.diagnostics = r.diagnostics;
      row.isolation_pass = r.isolation.pass;
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.fidelity = row.avg_pe = row.swap_time_ns = nan;
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) run_one(i);
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(result.rows.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& row : result.rows) {
    if (!row.error.empty()) continue;
    auto it = result.peaks.find(row.state_pair);
    if (it == result.peaks.end() || row.fidelity > it->second.fidelity) {
      result.peaks[row.state_pair] = {row.alpha, row.fidelity};
    }
  }
  return result;
}

std::string render_isolation(const IsolationReport& rep) {
  std::ostringstream os;
  char buf[200];
  auto num = [](double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", x);
    return std::string(b);
  };
  os << "isolation conditions (margin factor " << num(rep.margin_factor) << ")\n";
  os << "dispersive |Delta|/coupling:\n";
  for (const auto& e : rep.dispersive) {
    std::snprintf(buf, sizeof buf, "  pair %d %c  Delta/2pi = %9.4f GHz  ratio %10s  %s\n", e.pair + 1, e.mode,
                  e.detuning / kTwoPi / 1e9, num(e.ratio).c_str(), e.ok ? "ok" : "FAIL");
    os << buf;
  }
  os << "cross-pair |Delta_j - Delta_k| / |1/Delta_j + 1/Delta_k| vs coupling product:\n";
  if (rep.cross.empty()) os << "  (single pair, nothing to check)\n";
  for (const auto& e : rep.cross) {
    std::snprintf(buf, sizeof buf, "  pairs %d%c-%d%c  margin %10s  %s\n", e.j + 1, e.mode_j, e.k + 1, e.mode_k,
                  num(e.margin).c_str(), e.ok ? "ok" : "FAIL");
    os << buf;
  }
  for (const auto& err : rep.errors) os << "  error: " << err << "\n";
  os << "worst margin " << num(rep.worst_margin) << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string check_conditions(const SweepConfig& config) {
  return render_isolation(check_isolation(config.device_params(), config.isolation_margin));
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string csv_text(const SweepResult& result) {
  std::string out = "alpha,state_pair,fidelity,avg_pe,swap_time_ns\n";
  for (const auto& r : result.rows) {
    out += format_number(r.alpha) + "," + r.state_pair + "," + format_number(r.fidelity) + "," +
           format_number(r.avg_pe) + "," + format_number(r.swap_time_ns) + "\n";
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << csv_text(result);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace qswap
