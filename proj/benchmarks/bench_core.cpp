#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "ssem/experiment.hpp"
#include "ssem/qr_solver.hpp"

using namespace ssem;

namespace {

Field random_field_on(const Grid& grid) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(grid);
  for (auto& v : f.values) v = dist(gen);
  return f;
}

ConstraintSystem disc_system(int m, double density) {
  const CatalogProblem pb = catalog_problem("exp1");
  return ConstraintSystem::build(Grid(2, m), pb.domain, pb.op, pb.bc, density, pb.f,
                                 pb.g);
}

void BM_SmootherApply(benchmark::State& state) {
  const Grid grid(2, static_cast<int>(state.range(0)));
  const Field f = random_field_on(grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smoother_apply(f, 2, SmootherPower::inverse));
  }
}

void BM_EvaluateOffgrid(benchmark::State& state) {
  const Grid grid(2, static_cast<int>(state.range(0)));
  const Field f = random_field_on(grid);
  const auto bd = discretize_boundary_2d(domains::disc(), grid.m(), 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_offgrid(f, bd.points));
  }
}

void BM_NormalOperatorApply(benchmark::State& state) {
  const auto sys = disc_system(static_cast<int>(state.range(0)), 0.25);
  std::vector<double> lambda(sys.n_lambda(), 1.0);
  for (auto _ : state) {
    const Field v =
        smoother_apply(sys.apply_C_transpose(lambda), 2, SmootherPower::inverse);
    benchmark::DoNotOptimize(sys.apply_C(v));
  }
}

void BM_QrSolve(benchmark::State& state) {
  const auto sys = disc_system(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_qr(sys, 2));
  }
}

}  // namespace

BENCHMARK(BM_SmootherApply)->Arg(64)->Arg(256);
BENCHMARK(BM_EvaluateOffgrid)->Arg(64)->Arg(256);
BENCHMARK(BM_NormalOperatorApply)->Arg(64)->Arg(256);
BENCHMARK(BM_QrSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
