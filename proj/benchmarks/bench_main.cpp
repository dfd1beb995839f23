#include <benchmark/benchmark.h>

#include "upsilon/assignment.hpp"
#include "upsilon/calculus.hpp"
#include "upsilon/dynamics.hpp"
#include "upsilon/generators.hpp"
#include "upsilon/transport.hpp"

using namespace upsilon;

namespace {

SpaceForm model(int k) {
  switch (k) {
    case 0:
      return SpaceForm::euclidean(2);
    case 1:
      return SpaceForm::sphere(1.0);
    default:
      return SpaceForm::hyperbolic();
  }
}

void BM_SolveAssignment(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  RandomStream rng(1);
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveAssignment)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_DUpsilon(benchmark::State& state) {
  const SpaceForm space = model(static_cast<int>(state.range(1)));
  RandomStream rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Configuration a = random_configuration(space, n, 2.0, rng);
  const Configuration b = random_configuration(space, n, 2.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(d_upsilon(a, b));
  state.SetLabel(space.name());
}
BENCHMARK(BM_DUpsilon)->ArgsProduct({{4, 32, 128}, {0, 1, 2}});

void BM_EmpiricalW2(benchmark::State& state) {
  const SpaceForm space = SpaceForm::euclidean(2);
  RandomStream rng(3);
  std::vector<Configuration> a, b;
  for (int s = 0; s < state.range(0); ++s) {
    a.push_back(random_configuration(space, 3, 1.0, rng));
    b.push_back(random_configuration(space, 3, 1.0, rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(empirical_w2(a, b));
}
BENCHMARK(BM_EmpiricalW2)->Arg(32)->Arg(128);

void BM_HeatStep(benchmark::State& state) {
  const SpaceForm space = model(static_cast<int>(state.range(0)));
  RandomStream gen(4);
  const Configuration g = random_configuration(space, 8, 1.0, gen);
  RandomStream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(heat_step_config(g, 0.1, rng));
  state.SetLabel(space.name());
}
BENCHMARK(BM_HeatStep)->DenseRange(0, 2);

void BM_Gamma2(benchmark::State& state) {
  const SpaceForm space = model(static_cast<int>(state.range(0)));
  RandomStream rng(6);
  const CylinderFunction f = random_cylinder(space, 3, 1.0, rng);
  const Configuration g = random_configuration(space, 16, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gamma2_cylinder(f, g));
  state.SetLabel(space.name());
}
BENCHMARK(BM_Gamma2)->DenseRange(0, 2);

}  // namespace
BENCHMARK_MAIN();
