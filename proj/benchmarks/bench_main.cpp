#include <benchmark/benchmark.h>

#include "qswap/config.hpp"
#include "qswap/protocol.hpp"

namespace {

using namespace qswap;

DeviceParams device(const char* preset) { return preset_config(preset).device_params(); }

void BM_InteractionHamiltonian(benchmark::State& state) {
  const DeviceParams p = device("table1-exchange");
  const SpaceDescriptor s = make_space(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(interaction_hamiltonian(p, s, true));
}
BENCHMARK(BM_InteractionHamiltonian)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

// One Lindblad run of the exchange protocol at the given step (ps).
void BM_ExchangeLindblad(benchmark::State& state) {
  const DeviceParams p = device("table1-exchange");
  ProtocolOptions opts;
  opts.dt = static_cast<double>(state.range(0)) * 1e-12;
  const auto a = make_named_state("bell_psi_plus", 2);
  const auto b = make_named_state("bell_psi_minus", 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(p, a, b, opts).fidelity);
}
BENCHMARK(BM_ExchangeLindblad)->Arg(20)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_TransferLindblad(benchmark::State& state) {
  const DeviceParams p = device("table1-transfer");
  ProtocolOptions opts;
  opts.fock_levels = static_cast<int>(state.range(0));
  const auto a = make_named_state("bell_phi_plus", 2);
  const auto b = make_named_state("vacuum", 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(p, a, b, opts).fidelity);
}
BENCHMARK(BM_TransferLindblad)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TransferRk4(benchmark::State& state) {
  const DeviceParams p = device("table1-transfer");
  ProtocolOptions opts;
  opts.integrator = Integrator::rk4;
  const auto a = make_named_state("bell_phi_plus", 2);
  const auto b = make_named_state("vacuum", 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(p, a, b, opts).fidelity);
}
BENCHMARK(BM_TransferRk4)->Unit(benchmark::kMillisecond);

void BM_ExchangeUnitary(benchmark::State& state) {
  const DeviceParams p = device("table1-exchange");
  ProtocolOptions opts;
  opts.method = Method::full_unitary;
  const auto a = make_named_state("bell_phi_plus", 2);
  const auto b = make_named_state("bell_phi_minus", 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(p, a, b, opts).fidelity);
}
BENCHMARK(BM_ExchangeUnitary)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
