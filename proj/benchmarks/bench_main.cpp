#include <benchmark/benchmark.h>

#include "setrisk/harness.hpp"
#include "setrisk/instances.hpp"
#include "setrisk/scalarization.hpp"

using namespace setrisk;

namespace {

Polyhedron random_polyhedron(Rng& rng, std::size_t dim, std::size_t rows) {
  std::vector<Halfspace> ineqs;
  for (std::size_t i = 0; i < rows; ++i) ineqs.push_back({random_vec(rng, dim, 3, 1), random_rational(rng, 3, 1)});
  for (std::size_t i = 0; i < dim; ++i) ineqs.push_back({unit(dim, i), -5});
  return Polyhedron::from_inequalities(dim, std::move(ineqs));
}

}  // namespace

static void BM_DoubleDescription(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<Halfspace> ineqs;
  for (std::size_t i = 0; i < 3 * dim; ++i) ineqs.push_back({random_vec(rng, dim, 3, 1), random_rational(rng, 3, 1)});
  for (auto _ : state) benchmark::DoNotOptimize(Polyhedron::from_inequalities(dim, ineqs));
}
BENCHMARK(BM_DoubleDescription)->DenseRange(2, 6, 2);

static void BM_ProjectionFourierMotzkin(benchmark::State& state) {
  Rng rng(2);
  const auto p = random_polyhedron(rng, static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(project(p, {0, 1}));
}
BENCHMARK(BM_ProjectionFourierMotzkin)->DenseRange(3, 5, 1);

static void BM_ProjectionGenerators(benchmark::State& state) {
  Rng rng(2);
  const auto p = random_polyhedron(rng, static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(project_generators(p, {0, 1}));
}
BENCHMARK(BM_ProjectionGenerators)->DenseRange(3, 5, 1);

static void BM_MarketSumRoot(benchmark::State& state) {
  const auto c = instance_c();
  Rng rng(3);
  const auto x = random_claim(rng, c.tree);
  for (auto _ : state) benchmark::DoNotOptimize(risk_measure(AcceptanceSpec::market_sum(), x, c, 0));
}
BENCHMARK(BM_MarketSumRoot);

static void BM_MarketSumDirect(benchmark::State& state) {
  const auto c = instance_c();
  Rng rng(3);
  const auto x = random_claim(rng, c.tree);
  for (auto _ : state) benchmark::DoNotOptimize(primal_risk(AcceptanceSpec::market_sum(), x, c, 0));
}
BENCHMARK(BM_MarketSumDirect);

static void BM_ComposeRecursion(benchmark::State& state) {
  const auto c = instance_c();
  Rng rng(3);
  const auto x = random_claim(rng, c.tree);
  for (auto _ : state) benchmark::DoNotOptimize(compose_mptc(AcceptanceSpec::market_sum(), x, c));
}
BENCHMARK(BM_ComposeRecursion);

static void BM_ConstructiveAVaR(benchmark::State& state) {
  const auto b = instance_b();
  Rng rng(4);
  const auto x = random_claim(rng, b.tree);
  const std::vector<ScalarComponent> comps{ScalarComponent::avar(Rational(1, 2)), ScalarComponent::worst_case()};
  for (auto _ : state) benchmark::DoNotOptimize(constructive_risk(comps, Exchange::Solvency, x, b));
}
BENCHMARK(BM_ConstructiveAVaR);

static void BM_MaxDualSet(benchmark::State& state) {
  const auto c = instance_c();
  for (auto _ : state) benchmark::DoNotOptimize(max_dual_set(AcceptanceSpec::market_sum(), c));
}
BENCHMARK(BM_MaxDualSet);

static void BM_Superhedging(benchmark::State& state) {
  const auto b = instance_b();
  Rng rng(5);
  const auto x = random_claim(rng, b.tree);
  for (auto _ : state) benchmark::DoNotOptimize(superhedging_price(x, 0, b));
}
BENCHMARK(BM_Superhedging);

static void BM_ScalarRiskLp(benchmark::State& state) {
  const auto c = instance_c();
  Rng rng(6);
  const auto x = random_claim(rng, c.tree);
  for (auto _ : state) benchmark::DoNotOptimize(scalar_risk(AcceptanceSpec::market_sum(), x, {1, 1}, c, 0));
}
BENCHMARK(BM_ScalarRiskLp);

static void BM_DualStability(benchmark::State& state) {
  const auto c = instance_c();
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_dual_stability(AcceptanceSpec::market_sum(), AcceptanceSpec::market_sum(), c, 0, 1));
  }
}
BENCHMARK(BM_DualStability);

static void BM_PropertySuite(benchmark::State& state) {
  const auto a = instance_a();
  for (auto _ : state) {
    benchmark::DoNotOptimize(property_suite(AcceptanceSpec::market_sum(), a, "A", 1, 10));
  }
}
BENCHMARK(BM_PropertySuite)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
