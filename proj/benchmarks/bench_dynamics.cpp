#include <benchmark/benchmark.h>

#include <random>

#include "nnim/dynamics.hpp"
#include "nnim/inference.hpp"

using namespace nnim;

static void BM_NnimStep(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  int d = 32;
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> uni(0, 1);
  Matrix xi(n, d);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < d; ++i) xi(u, i) = uni(eng);
  OpinionState s;
  s.xi = xi;
  s.X = (xi.array() > 0.5).cast<double>().matrix();
  int k = KPolicy::log().resolve(n);
  for (auto _ : state) {
    OpinionState next = nnim_step(s, k, 17);
    benchmark::DoNotOptimize(next);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_NnimStep)->Range(256, 4096)->Complexity();

static void BM_InferenceStepExact(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::mt19937_64 eng(9);
  std::uniform_real_distribution<double> uni(0, 1);
  Matrix phi(n, 32);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < 32; ++i) phi(u, i) = uni(eng);
  BeliefMatrix cur{phi, false, 0};
  int k = KPolicy::log().resolve(n);
  for (auto _ : state) {
    BeliefMatrix next = inference_step(cur, k, IndexMode::kExact, 0.0, cur);
    benchmark::DoNotOptimize(next);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_InferenceStepExact)->Range(256, 4096)->Complexity();

static void BM_InferenceStepLsh(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::mt19937_64 eng(9);
  std::uniform_real_distribution<double> uni(0, 1);
  Matrix phi(n, 32);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < 32; ++i) phi(u, i) = uni(eng);
  BeliefMatrix cur{phi, false, 0};
  int k = KPolicy::log().resolve(n);
  for (auto _ : state) {
    BeliefMatrix next = inference_step(cur, k, IndexMode::kLsh, 0.0, cur);
    benchmark::DoNotOptimize(next);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_InferenceStepLsh)->Range(1024, 32768)->Complexity();

BENCHMARK_MAIN();
