#include <benchmark/benchmark.h>

#include <random>

#include "latticebands/bands.hpp"
#include "latticebands/dynamics.hpp"
#include "latticebands/latticesum.hpp"

using namespace lb;

namespace {

std::vector<SumPoint> points(int d, int n) {
  std::mt19937_64 r(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SumPoint> pts;
  for (int i = 0; i < n; ++i) {
    Bloch b(d);
    for (auto& x : b) x = 0.1 + 0.35 * u(r);
    pts.push_back({cplx(0.05 + 0.9 * u(r), -0.2 + 0.6 * u(r)), b});
  }
  return pts;
}

std::vector<double> spacing_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 390; ++i) g.push_back(0.05 + 0.005 * i);
  return g;
}

template <bool Parallel>
void BM_Oracle(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const cplx a(0.4, 0.2);
  const Bloch b(d, 0.23);
  const int radius = oracle_radius(d, a, b, 1e-8);
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? direct_sum_oracle(d, a, b, radius) : direct_sum_oracle_serial(d, a, b, radius));
}

template <bool Parallel>
void BM_SumBatch(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const auto pts = points(d, 64);
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? lattice_sum_batch(d, pts) : lattice_sum_batch_serial(d, pts));
}

template <bool Parallel>
void BM_Sweep(benchmark::State& st) {
  ModelParams p;
  p.d = static_cast<int>(st.range(0));
  const auto path = p.d == 1 ? bz_path(1, {"-X", "G", "X"}, 41) : bz_path(p.d, {"G", "X", "M", "G"}, 11);
  for (auto _ : st) benchmark::DoNotOptimize(Parallel ? band_sweep(path, p) : band_sweep_serial(path, p));
}

template <bool Parallel>
void BM_DecayScan(benchmark::State& st) {
  ModelParams p;
  p.d = static_cast<int>(st.range(0));
  const Bloch g(p.d, 0.0);
  const auto grid = spacing_grid();
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? decay_vs_spacing(g, grid, p) : decay_vs_spacing_serial(g, grid, p));
}

template <bool Parallel>
void BM_BandGrid(benchmark::State& st) {
  ModelParams p;
  p.d = static_cast<int>(st.range(0));
  const int n = p.d == 1 ? 256 : (p.d == 2 ? 64 : 16);
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? band_on_grid(p, n, false) : band_on_grid_serial(p, n, false));
}

template <bool Parallel>
void BM_Dynamics(benchmark::State& st) {
  ModelParams p;
  p.d = static_cast<int>(st.range(0));
  DynamicsOptions o;
  o.grid_n = p.d == 1 ? 256 : (p.d == 2 ? 64 : 16);
  o.window = o.grid_n / 2;
  o.refine_check = false;
  const TimeGrid t{{0, 1, 2, 5, 10}, TimeGrid::Norm::Gamma0Tau};
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? evolve_wavepacket(p, o, t) : evolve_wavepacket_serial(p, o, t));
}

}  // namespace

BENCHMARK(BM_Oracle<false>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Oracle<true>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SumBatch<false>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SumBatch<true>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep<false>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<true>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DecayScan<false>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecayScan<true>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BandGrid<false>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BandGrid<true>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Dynamics<false>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dynamics<true>)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
