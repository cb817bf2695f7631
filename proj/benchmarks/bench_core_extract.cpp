#include <benchmark/benchmark.h>

#include <random>

#include "nnim/core_extract.hpp"
#include "nnim/graph.hpp"

using namespace nnim;

namespace {

/// Preferential-attachment digraph with a heavy in-degree tail.
LabeledGraph hub_graph(int n, int follows_per_node, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<std::pair<int, int>> edges;
  std::vector<int> targets;
  targets.reserve(n * follows_per_node);
  for (int v = 0; v < 8 && v < n; ++v) targets.push_back(v);
  std::uniform_real_distribution<double> uni(0, 1);
  for (int u = 0; u < n; ++u) {
    for (int j = 0; j < follows_per_node; ++j) {
      int t = uni(eng) < 0.7 && !targets.empty()
                  ? targets[static_cast<int>(uni(eng) * targets.size())]
                  : static_cast<int>(uni(eng) * n);
      if (t == u) continue;
      edges.emplace_back(u, t);
      targets.push_back(t);
    }
  }
  return make_graph(n, edges, 1, {});
}

}  // namespace

static void BM_Bgmc(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  LabeledGraph g = hub_graph(n, 6, 3);
  int K = static_cast<int>(std::ceil(std::pow(n, 0.7)));
  for (auto _ : state) {
    CorePartition part = bgmc(g, K, 2.0, 4);
    benchmark::DoNotOptimize(part);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Bgmc)->Range(1024, 65536)->Complexity();

static void BM_GreedyMc(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  LabeledGraph g = hub_graph(n, 6, 3);
  int K = static_cast<int>(std::ceil(std::pow(n, 0.7)));
  for (auto _ : state) {
    CorePartition part = greedy_mc(g, K, 4);
    benchmark::DoNotOptimize(part);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GreedyMc)->Range(1024, 16384)->Complexity();
