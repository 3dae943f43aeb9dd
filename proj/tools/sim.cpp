// sim: single runs, detuning sweeps and condition checks for the register swap protocol.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qswap/config.hpp"
#include "qswap/sweep.hpp"

namespace {

using namespace qswap;

struct RunArgs {
  std::string config;
  std::string method;
  std::optional<double> crosstalk;
  std::optional<double> alpha;
  std::optional<int> fock;
  std::string out;
  std::string preset;
  bool json = false;
};

SweepConfig load_with_overrides(const RunArgs& args) {
  SweepConfig c = load_config(args.config);
  if (!args.method.empty()) c.method = method_from_string(args.method);
  if (args.crosstalk) c.crosstalk = *args.crosstalk;
  if (args.alpha) c.alpha = *args.alpha;
  if (args.fock) c.fock_levels = *args.fock;
  c.validate();
  return c;
}

int cmd_simulate(const RunArgs& args) {
  const SweepConfig c = load_with_overrides(args);
  const DeviceParams p = c.device_params();
  const ProtocolOptions opts = c.protocol_options();
  const int n = p.n_pairs();
  std::printf("%-32s %14s %14s %14s %12s\n", "state_pair", "fidelity", "avg_pe", "swap_time_ns", "trace_drift");
  bool warned = false;
  for (const auto& [a, b] : c.state_pairs) {
    const ProtocolResult r = run_protocol(p, make_named_state(a, n), make_named_state(b, n), opts);
    std::printf("%-32s %14s %14s %14s %12.3e\n", state_pair_label(a, b).c_str(), format_number(r.fidelity).c_str(),
                format_number(r.avg_coupler_excitation).c_str(), format_number(r.swap_time * 1e9).c_str(),
                r.diagnostics.max_trace_drift);
    if (!r.isolation.pass && !warned) {
      std::cerr << "warning: isolation conditions not met (worst margin " << format_number(r.isolation.worst_margin)
                << " < " << format_number(r.isolation.margin_factor) << ")\n";
      warned = true;
    }
  }
  return 0;
}

int cmd_sweep(const RunArgs& args) {
  SweepConfig c = load_with_overrides(args);
  if (!args.out.empty()) c.output = args.out;
  const SweepResult res = run_sweep(c);
  if (c.output.empty() || c.output == "-") {
    std::cout << csv_text(res);
  } else {
    emit_csv(res, c.output);
  }
  int failures = 0;
  for (const auto& row : res.rows) {
    if (!row.error.empty()) {
      std::cerr << "alpha " << format_number(row.alpha) << " " << row.state_pair << ": " << row.error << "\n";
      ++failures;
    }
  }
  for (const auto& [label, peak] : res.peaks) {
    std::cerr << "peak " << label << ": F = " << format_number(peak.fidelity) << " at alpha = "
              << format_number(peak.alpha) << "\n";
  }
  return failures == 0 ? 0 : 2;
}

int cmd_check(const RunArgs& args) {
  std::cout << check_conditions(load_with_overrides(args));
  return 0;
}

int cmd_presets_show(const RunArgs& args) {
  if (args.json) {
    std::cout << emit_config(preset_config(args.preset));
  } else {
    std::cout << render_preset(args.preset);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Register-to-register state transfer and exchange through a two-level coupler"};
  app.require_subcommand(1);
  RunArgs args;
  int (*action)(const RunArgs&) = nullptr;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--alpha", args.alpha, "Detuning ratio Delta/g for the run");
    sub->add_option("--crosstalk", args.crosstalk, "Uniform resonator crosstalk as a fraction of g");
    sub->add_option("--fock-levels", args.fock, "Fock levels per resonator");
  };

  auto* simulate = app.add_subcommand("simulate", "Run the protocol once for every configured state pair");
  add_common(simulate);
  simulate->add_option("--method", args.method, "full (Lindblad), full_unitary or effective")
      ->check(CLI::IsMember({"full", "full_lindblad", "full_unitary", "effective"}));
  simulate->callback([&] { action = cmd_simulate; });

  auto* sweep = app.add_subcommand("sweep", "Fidelity versus alpha over the configured grid");
  add_common(sweep);
  sweep->add_option("--method", args.method, "full (Lindblad), full_unitary or effective")
      ->check(CLI::IsMember({"full", "full_lindblad", "full_unitary", "effective"}));
  sweep->add_option("--out", args.out, "CSV output path ('-' for stdout)");
  sweep->callback([&] { action = cmd_sweep; });

  auto* check = app.add_subcommand("check-conditions", "Evaluate the isolation conditions");
  add_common(check);
  check->callback([&] { action = cmd_check; });

  auto* presets = app.add_subcommand("presets", "Built-in device presets");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "List preset names");
  list->callback([&] {
    action = [](const RunArgs&) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    };
  });
  auto* show = presets->add_subcommand("show", "Show a preset");
  show->add_option("name", args.preset, "Preset name")->required();
  show->add_flag("--json", args.json, "Print as a loadable config");
  show->callback([&] { action = cmd_presets_show; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return action(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
