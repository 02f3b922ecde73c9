#include <cmath>

#include <benchmark/benchmark.h>

#include <memory>

#include <bubblezoom/analysis.hpp>

namespace {

// One full recursion for a constant velocity; arg 0 = M, arg 1 = log10 Pe_h.
void BM_ElementContribs(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const double pe = std::pow(10.0, static_cast<double>(state.range(1)));
  for (auto _ : state) {
    bz::StabCache cache(bz::StabCacheOptions{M});
    const bz::ScaledCoefficients sc = bz::rescale(1.0 / pe, {1.0, 0.5}, 0.0, 1.0);
    benchmark::DoNotOptimize(bz::element_contribs(sc, cache));
    state.counters["solves"] = cache.stats().bubble_solves + 6;
  }
}
BENCHMARK(BM_ElementContribs)->Args({10, 1})->Args({20, 1})->Args({20, 3})->Args({20, 6})->Unit(benchmark::kMillisecond);

void BM_FineSolveFactorize(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const bz::ScaledCoefficients sc = bz::rescale(1.0 / 50.0, {1.0, 0.5}, 0.0, 1.0);
  for (auto _ : state) {
    bz::FineSolve fs(bz::Geometry::horizontal_patch, sc, M, std::nullopt);
    benchmark::DoNotOptimize(fs.solve_unit_rhs());
  }
}
BENCHMARK(BM_FineSolveFactorize)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

// Global bmz assembly with the tables already cached.
void BM_AssembleBmz(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const bz::Problem p = bz::make_example("example0");
  const bz::Grid grid = p.domain.mesh(N);
  const bz::DofMap dofs = bz::dof_layout(grid, bz::Scheme::bmz);
  bz::StabCache cache;
  const bz::BubbleBasis basis = bz::build_bubble_basis(grid, p.coeffs, cache);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bz::assemble_operator(grid, dofs, p.coeffs, &basis));
  }
  state.counters["dofs"] = dofs.total();
}
BENCHMARK(BM_AssembleBmz)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SampleLattice(benchmark::State& state) {
  const bz::Problem p = bz::make_example("example0");
  auto grid = std::make_shared<const bz::Grid>(p.domain.mesh(static_cast<int>(state.range(0))));
  bz::StabCache cache;
  const bz::Solution sol = bz::solve_steady(grid, p.coeffs, p.boundary, {}, cache);
  for (auto _ : state) benchmark::DoNotOptimize(bz::sample_lattice(sol));
}
BENCHMARK(BM_SampleLattice)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
