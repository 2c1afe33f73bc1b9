#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "zk/diagnostics.hpp"
#include "zk/ineq.hpp"
#include "zk/linear_propagator.hpp"
#include "zk/solver.hpp"
#include "zk/theory.hpp"

namespace {

using std::numbers::pi;

zk::SolverConfig config(int n) {
  zk::SolverConfig c;
  c.params = {1.0, pi, pi, pi};
  c.n_x = c.n_y = c.n_z = n;
  c.dt = 2e-3;
  c.t_end = 1.0;
  return c;
}

void BM_PropagatorSetup(benchmark::State& state) {
  const auto g = zk::make_grid(pi, pi, pi, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                               static_cast<int>(state.range(0)));
  for (auto _ : state) {
    zk::LinearPropagator p(g, 1.0, 2e-3);
    benchmark::DoNotOptimize(&p);
  }
}
BENCHMARK(BM_PropagatorSetup)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond);

void BM_LinearSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = zk::make_grid(pi, pi, pi, n, n, n);
  const zk::LinearPropagator p(g, 1.0, 2e-3);
  std::vector<double> rhs(p.layout().size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 1.0 / static_cast<double>(i + 1);
  std::vector<double> u(rhs.size());
  for (auto _ : state) {
    p.solve(rhs, u);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rhs.size()));
}
BENCHMARK(BM_LinearSolve)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
  const zk::Solver solver(config(static_cast<int>(state.range(0))));
  const auto s0 = solver.initial_state(zk::make_initial_bump(solver.grid(), 1e-3));
  const auto s1 = solver.step(s0);
  for (auto _ : state) {
    auto s2 = solver.step(s1);
    benchmark::DoNotOptimize(s2.u.max_abs());
  }
}
BENCHMARK(BM_Step)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond);

void BM_Record(benchmark::State& state) {
  const zk::Solver solver(config(static_cast<int>(state.range(0))));
  auto s = solver.initial_state(zk::make_initial_bump(solver.grid(), 1e-3));
  solver.cache_time_derivative(s);
  for (auto _ : state) benchmark::DoNotOptimize(zk::record(s, 1.0));
}
BENCHMARK(BM_Record)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond);

void BM_ComputeJ0(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto u0 = zk::make_initial_bump(zk::make_grid(pi, pi, pi, n, n, n), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(zk::compute_J0(u0, {1.0, pi, pi, pi}));
}
BENCHMARK(BM_ComputeJ0)->Arg(33)->Arg(49)->Unit(benchmark::kMillisecond);

void BM_SteklovSuite(benchmark::State& state) {
  const auto g = zk::make_grid(pi, pi, pi, 33, 33, 33);
  for (auto _ : state) benchmark::DoNotOptimize(zk::steklov_suite(g, zk::Axis::x, 10, 1).worst_ratio);
}
BENCHMARK(BM_SteklovSuite)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
