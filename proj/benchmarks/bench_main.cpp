#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwp/dsl.hpp"
#include "qwp/feasibility.hpp"
#include "qwp/measurement.hpp"
#include "qwp/rng.hpp"
#include "qwp/scenarios.hpp"
#include "qwp/state.hpp"

namespace {

using namespace qwp;

SystemLayout qubit_layout(std::size_t qubits) {
  std::vector<Subsystem> subsystems;
  for (std::size_t i = 0; i < qubits; ++i) {
    subsystems.push_back({"q" + std::to_string(i), 2});
  }
  return SystemLayout(subsystems);
}

StateVector random_state(const SystemLayout& layout, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<cplx> amplitudes(layout.total_dimension());
  for (cplx& amplitude : amplitudes) {
    amplitude = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  }
  return StateVector(layout, std::move(amplitudes));
}

void BM_apply_single_qubit_unitary(benchmark::State& state) {
  const std::size_t qubits = static_cast<std::size_t>(state.range(0));
  const SystemLayout layout = qubit_layout(qubits);
  const StateVector input = random_state(layout, 7);
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd hadamard(2, 2);
  hadamard << h, h, h, -h;
  const std::string target = "q" + std::to_string(qubits / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_unitary(input, {target}, hadamard));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(1) << qubits);
}
BENCHMARK(BM_apply_single_qubit_unitary)->DenseRange(4, 16, 4)->Complexity();

void BM_run_cat_scenario(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_cat());
  }
}
BENCHMARK(BM_run_cat_scenario);

void BM_collapse_ten_qubits(benchmark::State& state) {
  const SystemLayout layout = qubit_layout(10);
  const StateVector input = random_state(layout, 11);
  const Basis z("z", "q5",
                {{"0", {cplx(1.0, 0.0), cplx(0.0, 0.0)}},
                 {"1", {cplx(0.0, 0.0), cplx(1.0, 0.0)}}});
  std::uint64_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(collapse(input, "q5", z, trial++));
  }
}
BENCHMARK(BM_collapse_ten_qubits);

void BM_parse_protocol_text(benchmark::State& state) {
  const std::string source(scenario_source(Scenario::cat));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_protocol(source));
  }
}
BENCHMARK(BM_parse_protocol_text);

void BM_exchange_in_place(benchmark::State& state) {
  const std::size_t qubits = static_cast<std::size_t>(state.range(0));
  const SystemLayout layout = qubit_layout(qubits);
  const StateVector input = random_state(layout, 3);
  std::vector<cplx> amplitudes(input.amplitudes().begin(),
                               input.amplitudes().end());
  for (auto _ : state) {
    apply_exchange(amplitudes);
    benchmark::DoNotOptimize(amplitudes.data());
  }
}
BENCHMARK(BM_exchange_in_place)->DenseRange(8, 20, 4);

void BM_needle_evolution_applicative(benchmark::State& state) {
  const std::size_t lattice = static_cast<std::size_t>(1)
                              << static_cast<std::size_t>(state.range(0));
  const MacroAgent agent{1};
  const NeedleModel needle{lattice, 1.0, 1.0, 4.0};
  std::vector<cplx> pointer(lattice, cplx{0.0, 0.0});
  pointer[lattice / 2] = cplx{1.0, 0.0};
  const StateVector joint = make_product_state(
      needle_layout(needle, agent), {agent.record_superposition(+1), pointer});
  for (auto _ : state) {
    benchmark::DoNotOptimize(needle_evolution(needle, agent, joint));
  }
}
BENCHMARK(BM_needle_evolution_applicative)->DenseRange(6, 14, 4);

void BM_parity_matrix_dense(benchmark::State& state) {
  const ParityModel model{static_cast<std::size_t>(state.range(0)), 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(parity_matrix(model));
  }
}
BENCHMARK(BM_parity_matrix_dense)->Arg(16)->Arg(64)->Arg(256);

void BM_dephasing_trials(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cat_measurement_dephasing(6, 0.1, 256, 99));
  }
}
BENCHMARK(BM_dephasing_trials);

}  // namespace

BENCHMARK_MAIN();
