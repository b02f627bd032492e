// Serial reference kernels against their OpenMP versions.
// Run with OMP_NUM_THREADS or --threads=<n> to vary the parallel width.

#include "fkdv/frac_assembly.hpp"
#include "fkdv/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>

using namespace fkdv;

namespace {

FemFunction random_function(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  FemFunction u(g);
  for (int i = 0; i < g.n_dofs(); ++i)
    u.coeffs()[i] = nd(rng);
  return u;
}

double smooth(double x) { return std::exp(std::sin(x)) * std::cos(3.0 * x); }

template <bool Par> void BM_nonlinear_load(benchmark::State& st) {
  const Grid g(0.0, 6.283185307179586, static_cast<int>(st.range(0)));
  const FemFunction w = random_function(g, 1), u = random_function(g, 2);
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? kernels::parallel::nonlinear_load(w, u, 8) : kernels::serial::nonlinear_load(w, u, 8));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Par> void BM_projection_load(benchmark::State& st) {
  const Grid g(0.0, 6.283185307179586, static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? kernels::parallel::projection_load(smooth, g, 8)
                                 : kernels::serial::projection_load(smooth, g, 8));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Par> void BM_cubic_integral(benchmark::State& st) {
  const Grid g(0.0, 6.283185307179586, static_cast<int>(st.range(0)));
  const FemFunction u = random_function(g, 3);
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? kernels::parallel::cubic_integral(u, 8) : kernels::serial::cubic_integral(u, 8));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Par> void BM_assembly(benchmark::State& st) {
  const Grid g(-15.0, 15.0, static_cast<int>(st.range(0)));
  const FractionalOrder a(1.5);
  for (auto _ : st)
    benchmark::DoNotOptimize(Par ? assemble_offset_blocks(g, a, {}, OperatorKind::disp)
                                 : assemble_offset_blocks_serial(g, a, {}, OperatorKind::disp));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(BM_nonlinear_load<false>)->Name("nonlinear_load/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_nonlinear_load<true>)->Name("nonlinear_load/parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_projection_load<false>)->Name("projection_load/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_projection_load<true>)->Name("projection_load/parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_cubic_integral<false>)->Name("cubic_integral/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_cubic_integral<true>)->Name("cubic_integral/parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_assembly<false>)->Name("disp_assembly/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assembly<true>)->Name("disp_assembly/parallel")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  // --threads=<n> is ours; everything else goes to the benchmark library
  int kept = 1;
  for (int i = 1; i < argc; ++i) {
    if (std::strncmp(argv[i], "--threads=", 10) == 0)
      kernels::set_threads(std::stoi(argv[i] + 10));
    else
      argv[kept++] = argv[i];
  }
  argc = kept;
  benchmark::AddCustomContext("parallel_threads", std::to_string(kernels::max_threads()));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv))
    return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
