#include <benchmark/benchmark.h>

#include <random>

#include "cloak/conformal.hpp"
#include "cloak/radial.hpp"
#include "cloak/variational.hpp"

using namespace cloak;

static void BM_GInverse(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> s(-50.0, 0.0);
  std::vector<double> targets(256);
  for (double& t : targets) t = s(rng);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial::g_inverse(targets[k++ % targets.size()], p));
  }
}
BENCHMARK(BM_GInverse)->Arg(1)->Arg(2)->Arg(5)->Arg(13);

static void BM_SolveOptimalProfile(benchmark::State& state) {
  const AnnulusSpec spec(0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial::solve_optimal_profile(spec, 2.0, static_cast<int>(state.range(0))));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveOptimalProfile)->RangeMultiplier(4)->Range(100, 6400)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_EnergyP(benchmark::State& state) {
  const auto f = radial::solve_optimal_profile(AnnulusSpec(0.01), 3.0, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(radial::energy_p(f, 3.0).value);
}
BENCHMARK(BM_EnergyP)->Unit(benchmark::kMicrosecond);

static void BM_FunctionalFp(benchmark::State& state) {
  const int n_r = static_cast<int>(state.range(0));
  const variational::PolarGrid g(0.1, n_r, 2 * n_r);
  const auto f = radial::solve_optimal_profile(AnnulusSpec(0.1), 2.0, 400);
  const auto u = variational::lift_profile(f, g);
  const auto v = variational::minus_rotated_gradient(variational::lift_arg(g));
  for (auto _ : state) benchmark::DoNotOptimize(variational::functional_Fp(u, v, 2.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_FunctionalFp)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_ElResidual2d(benchmark::State& state) {
  const int n_r = static_cast<int>(state.range(0));
  const variational::PolarGrid g(0.1, n_r, 2 * n_r);
  const auto f = radial::solve_optimal_profile(AnnulusSpec(0.1), 2.0, 400);
  const auto psi = variational::lift_profile(f, g);
  const auto theta = variational::lift_arg(g);
  for (auto _ : state) benchmark::DoNotOptimize(variational::el_residual_2d(psi, theta, 2.0));
}
BENCHMARK(BM_ElResidual2d)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_ConformalCloakMap(benchmark::State& state) {
  const AnnulusSpec spec(0.1);
  const conformal::ComposedCloakMap m{
      conformal::builtin_map(state.range(0) == 0 ? "sinh" : "power"),
      radial::solve_optimal_profile(spec, 1.0, 400)};
  std::vector<Vec2> xs;
  for (int k = 0; k < 64; ++k) {
    const conformal::Complex w = std::polar(0.1 + 0.85 * (k % 8) / 7.0, 0.37 * k);
    xs.push_back(conformal::to_vec(m.analytic.inverse(w)));
  }
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(conformal::evaluate_cloak_map(m, xs[k++ % xs.size()]));
  state.SetLabel(m.analytic.name());
}
BENCHMARK(BM_ConformalCloakMap)->Arg(0)->Arg(1);

static void BM_ModifiedEnergy(benchmark::State& state) {
  const conformal::ComposedCloakMap m{conformal::builtin_map("sinh"),
                                      radial::solve_optimal_profile(AnnulusSpec(0.01), 1.0, 1000)};
  for (auto _ : state) benchmark::DoNotOptimize(conformal::modified_energy(m, 1.0));
}
BENCHMARK(BM_ModifiedEnergy)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
