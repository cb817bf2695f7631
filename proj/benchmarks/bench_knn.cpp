#include <benchmark/benchmark.h>

#include <random>

#include "nnim/knn.hpp"

using namespace nnim;

namespace {

Matrix gaussian_points(int n, int d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0, 1);
  Matrix pts(n, d);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < d; ++i) pts(u, i) = gauss(eng);
  return pts;
}

Matrix binary_points(int n, int d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::bernoulli_distribution bit(0.5);
  Matrix pts(n, d);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < d; ++i) pts(u, i) = bit(eng) ? 1.0 : 0.0;
  return pts;
}

}  // namespace

static void BM_ExactKnnEuclidean(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Matrix pts = gaussian_points(n, 16, 7);
  for (auto _ : state) {
    auto sets = exact_knn(pts, 10, Metric::kEuclidean);
    benchmark::DoNotOptimize(sets);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ExactKnnEuclidean)->Range(256, 8192)->Complexity();

static void BM_ExactKnnHamming(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Matrix pts = binary_points(n, 128, 11);
  for (auto _ : state) {
    auto sets = exact_knn(pts, 10, Metric::kHamming);
    benchmark::DoNotOptimize(sets);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ExactKnnHamming)->Range(256, 8192)->Complexity();

static void BM_LshQueryAll(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Matrix pts = gaussian_points(n, 16, 7);
  for (auto _ : state) {
    LshForest forest(pts, {10, 64, 17});
    auto sets = forest.query_all(10, Metric::kEuclidean);
    benchmark::DoNotOptimize(sets);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LshQueryAll)->Range(1024, 65536)->Complexity();
