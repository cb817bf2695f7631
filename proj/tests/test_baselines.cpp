#include <cmath>
#include <random>

#include "doctest.h"
#include "nnim/baselines.hpp"
#include "nnim/core_extract.hpp"
#include "nnim/graph.hpp"
#include "nnim/inference.hpp"

using namespace nnim;

namespace {

CorePartition manual_partition(const LabeledGraph& g, std::vector<int> core,
                               std::vector<int> periphery) {
  CorePartition part;
  part.core = std::move(core);
  part.periphery = std::move(periphery);
  std::vector<char> in_core(g.num_nodes, 0);
  for (int c : part.core) in_core[c] = 1;
  part.followed_core.resize(part.periphery.size());
  for (std::size_t r = 0; r < part.periphery.size(); ++r)
    for (int c : g.out_adj[part.periphery[r]])
      if (in_core[c]) part.followed_core[r].push_back(c);
  return part;
}

}  // namespace

TEST_CASE("bipartite collaborative filter copies a single followed core") {
  LabeledGraph g = make_graph(2, {{1, 0}}, 3, {{0, 2}, {}});
  CorePartition part = manual_partition(g, {0}, {1});
  ScoreMatrix s = cf_bipartite(part, g);
  CHECK(s.scores(0, 0) == 1.0);
  CHECK(s.scores(0, 1) == 0.0);
  CHECK(s.scores(0, 2) == 1.0);
}

TEST_CASE("zero-step inference equals the bipartite filter") {
  std::mt19937_64 eng(13);
  std::bernoulli_distribution bit(0.5);
  std::vector<std::pair<int, int>> edges;
  for (int u = 4; u < 24; ++u) {
    edges.emplace_back(u, u % 4);
    if (bit(eng)) edges.emplace_back(u, (u + 1) % 4);
  }
  std::vector<std::vector<int>> ones(24);
  for (int v = 0; v < 24; ++v)
    for (int i = 0; i < 5; ++i)
      if (bit(eng)) ones[v].push_back(i);
  LabeledGraph g = make_graph(24, edges, 5, ones);
  CorePartition part = bgmc(g, 4, 2.0, 1);

  InferenceConfig cfg;
  cfg.k_policy = KPolicy::log();
  cfg.max_steps = 0;
  cfg.pca = false;
  cfg.index_mode = IndexMode::kExact;
  InferenceResult res = run_inference(part, g, cfg);
  ScoreMatrix cf = cf_bipartite(part, g);
  CHECK((res.beliefs.phi - cf.scores).cwiseAbs().sum() == 0.0);
}

TEST_CASE("dynamic filter walks labels down a path") {
  // core 0 -> a(1) -> b(2), undirected adjacency applies
  LabeledGraph g = make_graph(3, {{0, 1}, {1, 2}}, 2, {{0}, {}, {}});
  CorePartition part = manual_partition(g, {0}, {1, 2});

  ScoreMatrix one_step = cf_dynamic(g, part, 1, 0.0);
  CHECK(one_step.scores(0, 0) == 1.0);   // a took the core label
  CHECK(one_step.scores(0, 1) == 0.0);
  CHECK(one_step.scores(1, 0) == 0.5);   // b untouched

  ScoreMatrix two_steps = cf_dynamic(g, part, 2, 0.0);
  CHECK(two_steps.scores(1, 0) == 1.0);  // b reached through a
  CHECK(two_steps.scores(1, 1) == 0.0);
}

TEST_CASE("fully core-connected periphery reduces to the bipartite filter") {
  std::vector<std::pair<int, int>> edges;
  for (int u = 3; u < 9; ++u)
    for (int c = 0; c < 3; ++c) edges.emplace_back(u, c);
  LabeledGraph g = make_graph(9, edges, 2, {{0}, {1}, {0, 1}});
  CorePartition part = manual_partition(g, {0, 1, 2}, {3, 4, 5, 6, 7, 8});
  ScoreMatrix dyn = cf_dynamic(g, part, 1, 0.0);
  ScoreMatrix cf = cf_bipartite(part, g);
  CHECK((dyn.scores - cf.scores).cwiseAbs().sum() == 0.0);
}

TEST_CASE("dynamic filter matches an independent fixed-point iteration") {
  std::mt19937_64 eng(23);
  std::bernoulli_distribution flip(0.25);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      if (a != b && flip(eng)) edges.emplace_back(a, b);
  std::vector<std::vector<int>> ones(10);
  for (int v = 0; v < 10; ++v)
    if (flip(eng)) ones[v].push_back(0);
  LabeledGraph g = make_graph(10, edges, 1, ones);
  CorePartition part = bgmc(g, 3, 2.0, 0);
  REQUIRE(!part.periphery.empty());

  const int steps = 25;
  ScoreMatrix dyn = cf_dynamic(g, part, steps, -1.0);  // run all steps

  // Oracle: same recurrence written independently over dense vectors.
  std::vector<char> is_core(10, 0);
  for (int c : part.core) is_core[c] = 1;
  std::vector<double> val(10, 0.5);
  std::vector<char> lab(10, 0);
  for (int c : part.core) {
    val[c] = g.labels(c, 0);
    lab[c] = 1;
  }
  for (int t = 0; t < steps; ++t) {
    auto nv = val;
    auto nl = lab;
    for (int v = 0; v < 10; ++v) {
      if (is_core[v]) continue;
      double acc = 0;
      int cnt = 0;
      for (int w = 0; w < 10; ++w) {
        bool adjacent = false;
        for (int x : g.out_adj[v]) adjacent |= x == w;
        for (int x : g.in_adj[v]) adjacent |= x == w;
        if (adjacent && lab[w]) {
          acc += val[w];
          ++cnt;
        }
      }
      if (cnt > 0) {
        nv[v] = acc / cnt;
        nl[v] = 1;
      }
    }
    val = nv;
    lab = nl;
  }
  for (std::size_t r = 0; r < part.periphery.size(); ++r)
    CHECK(dyn.scores(r, 0) ==
          doctest::Approx(val[part.periphery[r]]).epsilon(1e-12));
}

TEST_CASE("label propagation: a labeled hub floods its star") {
  std::vector<std::pair<int, int>> edges;
  for (int leaf = 1; leaf <= 6; ++leaf) edges.emplace_back(leaf, 0);
  LabeledGraph g = make_graph(7, edges, 2, {{1}, {}, {}, {}, {}, {}, {}});
  CorePartition part = manual_partition(g, {0}, {1, 2, 3, 4, 5, 6});
  ScoreMatrix s = label_propagation(g, part, 17);
  for (int r = 0; r < 6; ++r) {
    CHECK(s.scores(r, 0) == 0.0);
    CHECK(s.scores(r, 1) == 1.0);
  }
}

TEST_CASE("label propagation splits a barbell at its communities") {
  // Two cliques {0,1,2,3} and {4,5,6,7} joined by one bridge 3-7;
  // cores 0 and 4 carry opposite labels.
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) edges.emplace_back(a, b);
  for (int a = 4; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b) edges.emplace_back(a, b);
  edges.emplace_back(3, 7);
  LabeledGraph g = make_graph(8, edges, 2, {{0}, {}, {}, {}, {1}, {}, {}, {}},
                              /*directed=*/false);
  CorePartition part = manual_partition(g, {0, 4}, {1, 2, 3, 5, 6, 7});
  ScoreMatrix s = label_propagation(g, part, 17);
  // periphery rows: 1,2,3 belong to community zero; 5,6,7 to community one
  for (int r = 0; r < 3; ++r) {
    CHECK(s.scores(r, 0) == 1.0);
    CHECK(s.scores(r, 1) == 0.0);
  }
  for (int r = 3; r < 6; ++r) {
    CHECK(s.scores(r, 0) == 0.0);
    CHECK(s.scores(r, 1) == 1.0);
  }
}

TEST_CASE("label propagation is reproducible from its seed") {
  std::mt19937_64 eng(29);
  std::bernoulli_distribution flip(0.3);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 15; ++a)
    for (int b = 0; b < 15; ++b)
      if (a != b && flip(eng)) edges.emplace_back(a, b);
  std::vector<std::vector<int>> ones(15);
  for (int v = 0; v < 15; ++v)
    for (int i = 0; i < 3; ++i)
      if (flip(eng)) ones[v].push_back(i);
  LabeledGraph g = make_graph(15, edges, 3, ones);
  CorePartition part = bgmc(g, 4, 2.0, 0);
  ScoreMatrix a = label_propagation(g, part, 55);
  ScoreMatrix b = label_propagation(g, part, 55);
  CHECK((a.scores - b.scores).cwiseAbs().sum() == 0.0);
}

TEST_CASE("random-hk with a full ball and full k is one-step consensus") {
  LabeledGraph g = make_graph(5, {{1, 0}, {2, 0}, {3, 0}, {4, 0}}, 2,
                              {{0, 1}, {}, {}, {}, {}});
  CorePartition part = manual_partition(g, {0}, {1, 2, 3, 4});
  RandomHkConfig cfg;
  cfg.k = 4;
  cfg.epsilon_radius = 10.0;
  cfg.D = 1e-9;
  cfg.max_steps = 10;
  cfg.seed = 3;
  ScoreMatrix s = random_hk(part, g, cfg);
  for (int r = 0; r < 4; ++r)
    for (int i = 0; i < 2; ++i)
      CHECK(s.scores(r, i) == doctest::Approx(s.scores(0, i)));
}

TEST_CASE("zero radius freezes the dynamics") {
  std::mt19937_64 eng(4);
  std::bernoulli_distribution bit(0.5);
  std::vector<std::pair<int, int>> edges;
  for (int u = 2; u < 12; ++u) edges.emplace_back(u, u % 2);
  std::vector<std::vector<int>> ones(12);
  for (int v = 0; v < 12; ++v)
    for (int i = 0; i < 4; ++i)
      if (bit(eng)) ones[v].push_back(i);
  LabeledGraph g = make_graph(12, edges, 4, ones);
  CorePartition part = bgmc(g, 2, 2.0, 1);
  RandomHkConfig cfg;
  cfg.k = 3;
  cfg.epsilon_radius = 0.0;
  cfg.max_steps = 12;
  ScoreMatrix frozen = random_hk(part, g, cfg);
  ScoreMatrix init = cf_bipartite(part, g);
  CHECK((frozen.scores - init.scores).cwiseAbs().sum() == 0.0);
}

TEST_CASE("dynamic baselines record finite displacements") {
  std::mt19937_64 eng(44);
  std::bernoulli_distribution flip(0.2);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 14; ++a)
    for (int b = 0; b < 14; ++b)
      if (a != b && flip(eng)) edges.emplace_back(a, b);
  std::vector<std::vector<int>> ones(14);
  for (int v = 0; v < 14; ++v)
    if (flip(eng)) ones[v].push_back(0);
  LabeledGraph g = make_graph(14, edges, 1, ones);
  CorePartition part = bgmc(g, 3, 2.0, 0);
  REQUIRE(!part.periphery.empty());

  std::vector<double> disp_cf, disp_hk;
  cf_dynamic(g, part, 15, 1e-6, &disp_cf);
  RandomHkConfig cfg;
  cfg.k = 3;
  cfg.epsilon_radius = 0.4;
  cfg.max_steps = 15;
  random_hk(part, g, cfg, &disp_hk);
  CHECK(!disp_cf.empty());
  CHECK(!disp_hk.empty());
  for (double d : disp_cf) CHECK(std::isfinite(d));
  for (double d : disp_hk) CHECK(std::isfinite(d));
}

TEST_CASE("label propagation counts rows it never reaches") {
  // Core 0 with one follower 1; node 2 is engaged but fully isolated from
  // labeled mass once partitioned manually.
  LabeledGraph g = make_graph(3, {{1, 0}}, 1, {{0}, {}, {}});
  CorePartition part = manual_partition(g, {0}, {1, 2});
  int unlabeled = -1;
  ScoreMatrix s = label_propagation(g, part, 17, 50, &unlabeled);
  CHECK(unlabeled == 1);
  CHECK(s.scores(1, 0) == 0.0);  // isolated row stays all-zero
}

TEST_CASE("random-hk replays exactly under a fixed seed") {
  std::mt19937_64 eng(6);
  std::bernoulli_distribution bit(0.5);
  std::vector<std::pair<int, int>> edges;
  for (int u = 3; u < 33; ++u) {
    edges.emplace_back(u, u % 3);
    if (bit(eng)) edges.emplace_back(u, (u + 1) % 3);
  }
  std::vector<std::vector<int>> ones(33);
  for (int v = 0; v < 33; ++v)
    for (int i = 0; i < 2; ++i)
      if (bit(eng)) ones[v].push_back(i);
  LabeledGraph g = make_graph(33, edges, 2, ones);
  CorePartition part = bgmc(g, 3, 2.0, 1);
  RandomHkConfig cfg;
  cfg.k = 4;
  cfg.epsilon_radius = 0.5;
  cfg.D = 1e-6;
  cfg.max_steps = 30;
  cfg.seed = 91;
  ScoreMatrix a = random_hk(part, g, cfg);
  ScoreMatrix b = random_hk(part, g, cfg);
  CHECK((a.scores - b.scores).cwiseAbs().sum() == 0.0);
}
