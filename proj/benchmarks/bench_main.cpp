#include <benchmark/benchmark.h>

#include "radbif/curve.hpp"
#include "radbif/linearized.hpp"
#include "radbif/shoot.hpp"
#include "radbif/transform.hpp"

namespace {

using namespace radbif;

void BM_Shot(benchmark::State& state) {
  const Nonlinearity m = Nonlinearity::perturbed_gelfand(0.22);
  const double alpha = double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lambda_of_alpha(m, alpha, 2, {}));
}
BENCHMARK(BM_Shot)->Arg(1)->Arg(10)->Arg(100);

void BM_SensitiveShot(benchmark::State& state) {
  const Nonlinearity m = Nonlinearity::perturbed_gelfand(0.22);
  for (auto _ : state) benchmark::DoNotOptimize(sensitive_shot(m, 5.0, 2, {}));
}
BENCHMARK(BM_SensitiveShot);

void BM_TraceSShaped(benchmark::State& state) {
  const Nonlinearity m = Nonlinearity::perturbed_gelfand(0.22);
  for (auto _ : state) benchmark::DoNotOptimize(trace(m, 2, 1e-3, 200.0));
}
BENCHMARK(BM_TraceSShaped)->Unit(benchmark::kMillisecond);

void BM_TraceMultiTurn(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(trace(Nonlinearity::gelfand(), 3, 0.1, 1000.0));
}
BENCHMARK(BM_TraceMultiTurn)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_FoldCertificates(benchmark::State& state) {
  const Nonlinearity m = Nonlinearity::perturbed_gelfand(0.22);
  const auto bvp = bvp_profile(m, 3.4221525103, 2, {});
  for (auto _ : state) {
    const LinearizedProfile lin = solve_linearized(m, *bvp, 2);
    benchmark::DoNotOptimize(positivity_certificate(lin));
    benchmark::DoNotOptimize(nondegeneracy(m, *bvp, lin, 2));
    benchmark::DoNotOptimize(test_function_search(m, *bvp, 2));
  }
}
BENCHMARK(BM_FoldCertificates)->Unit(benchmark::kMicrosecond);

void BM_MuSweep(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(1.6 + 0.2 * i);
  for (auto _ : state) benchmark::DoNotOptimize(lemma42_sweep(0.5, grid, {}, 1));
}
BENCHMARK(BM_MuSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
