#include <benchmark/benchmark.h>

#include <random>

#include "tfim/detection.hpp"
#include "tfim/dynamics.hpp"
#include "tfim/hamiltonian.hpp"
#include "tfim/krylov.hpp"

using namespace tfim;

namespace {

StateVector random_state(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  StateVector s(n);
  for (auto& a : s.amplitudes()) a = {g(rng), g(rng)};
  s.normalize();
  return s;
}

void BM_ApplyHamiltonian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IsingHamiltonian h(synthetic_power_law(n, 1.0, 1.0), 2.0);
  const auto psi = random_state(n);
  StateVector out(n);
  for (auto _ : state) {
    h.apply(psi.amplitudes(), out.amplitudes());
    benchmark::DoNotOptimize(out[0]);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.dim()));
}
BENCHMARK(BM_ApplyHamiltonian)->Arg(10)->Arg(14)->Arg(16);

void BM_ApplyIsingFrame(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IsingHamiltonian h(synthetic_power_law(n, 1.0, 1.0), 2.0);
  const auto psi = random_state(n);
  StateVector out(n);
  for (auto _ : state) {
    h.apply_ising_frame(psi.amplitudes(), out.amplitudes());
    benchmark::DoNotOptimize(out[0]);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.dim()));
}
BENCHMARK(BM_ApplyIsingFrame)->Arg(10)->Arg(14)->Arg(16)->Arg(20);

void BM_KrylovStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IsingHamiltonian h(synthetic_power_law(n, 1.0, 1.0), 2.0);
  const auto op = h.ising_frame_operator();
  const LinearMap map = [&](std::span<const Complex> in, std::span<Complex> out) { op.apply(in, out); };
  auto psi = random_state(n);
  for (auto _ : state) krylov_expm_apply(map, 0.2, psi.amplitudes());
}
BENCHMARK(BM_KrylovStep)->Arg(10)->Arg(14)->Unit(benchmark::kMicrosecond);

void BM_ClassicalEnergies(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto j = synthetic_power_law(n, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(classical_energies(j));
}
BENCHMARK(BM_ClassicalEnergies)->Arg(10)->Arg(16)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Deconvolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto d = ProbabilityDistribution::from_state(random_state(n), Axis::x);
  const auto ch = DetectionChannel::symmetric(0.93);
  for (auto _ : state) benchmark::DoNotOptimize(deconvolve(d, ch));
}
BENCHMARK(BM_Deconvolve)->Arg(10)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_QuenchN10(benchmark::State& state) {
  const auto j = synthetic_power_law(10, 1.0, 1.05);
  const auto init = prepare_initial_state(10, Direction::plus_y);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(init, j, RampSchedule::exponential(1.0, 0.4)));
}
BENCHMARK(BM_QuenchN10)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
