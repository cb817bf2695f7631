#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nnim/baselines.hpp"
#include "nnim/core_extract.hpp"
#include "nnim/errors.hpp"
#include "nnim/graph.hpp"
#include "nnim/inference.hpp"

using namespace nnim;

namespace {

Matrix column(std::initializer_list<double> vals) {
  Matrix m(vals.size(), 1);
  int i = 0;
  for (double v : vals) m(i++, 0) = v;
  return m;
}

BeliefMatrix beliefs_of(Matrix phi) {
  BeliefMatrix b;
  b.phi = std::move(phi);
  return b;
}

/// A small random core-periphery instance where every periphery node
/// follows at least one core node.
struct Instance {
  LabeledGraph g;
  CorePartition part;
};

Instance random_instance(int cores, int periph, int d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::bernoulli_distribution bit(0.5);
  std::uniform_int_distribution<int> corepick(0, cores - 1);
  std::vector<std::pair<int, int>> edges;
  for (int u = cores; u < cores + periph; ++u) {
    int first = corepick(eng);
    edges.emplace_back(u, first);
    for (int c = 0; c < cores; ++c)
      if (c != first && bit(eng)) edges.emplace_back(u, c);
  }
  std::vector<std::vector<int>> ones(cores + periph);
  for (int v = 0; v < cores + periph; ++v)
    for (int i = 0; i < d; ++i)
      if (bit(eng)) ones[v].push_back(i);
  LabeledGraph g = make_graph(cores + periph, edges, d, ones);
  CorePartition part = bgmc(g, cores, 2.0, 1);
  return {std::move(g), std::move(part)};
}

/// Straight-line reimplementation of the regularized update for the oracle.
Matrix recurrence_oracle(const Matrix& phi, const Matrix& phi0, int k,
                         double alpha) {
  const int n = static_cast<int>(phi.rows());
  Matrix next(n, phi.cols());
  for (int u = 0; u < n; ++u) {
    std::vector<std::pair<std::pair<double, int>, int>> cand;
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      cand.push_back({{(phi.row(v) - phi.row(u)).norm(), v}, v});
    }
    std::sort(cand.begin(), cand.end());
    Eigen::RowVectorXd acc = phi.row(u);
    int take = std::min(k - 1, n - 1);
    for (int j = 0; j < take; ++j) acc += phi.row(cand[j].second);
    acc += alpha * phi0.row(u);
    next.row(u) = acc / (take + 1 + alpha);
  }
  return next;
}

}  // namespace

TEST_CASE("initialization is the mean of followed core labels") {
  // cores 0,1 with labels; periphery 2 follows 0; periphery 3 follows both
  LabeledGraph g = make_graph(4, {{2, 0}, {3, 0}, {3, 1}}, 3,
                              {{0, 2}, {}, {}, {}});
  CorePartition part;
  part.core = {0, 1};
  part.periphery = {2, 3};
  part.followed_core = {{0}, {0, 1}};
  BeliefMatrix b = initialize_beliefs(part, g);
  CHECK(b.phi(0, 0) == 1.0);
  CHECK(b.phi(0, 1) == 0.0);
  CHECK(b.phi(0, 2) == 1.0);
  CHECK(b.phi(1, 0) == 0.5);
  CHECK(b.phi(1, 1) == 0.0);
  CHECK(b.phi(1, 2) == 0.5);
}

TEST_CASE("initialization equals the bipartite collaborative filter") {
  Instance inst = random_instance(5, 30, 6, 11);
  BeliefMatrix init = initialize_beliefs(inst.part, inst.g);
  ScoreMatrix cf = cf_bipartite(inst.part, inst.g);
  CHECK((init.phi - cf.scores).cwiseAbs().sum() == 0.0);
}

TEST_CASE("a periphery row without followed cores is a hard error") {
  LabeledGraph g = make_graph(2, {{1, 0}}, 1, {});
  CorePartition part;
  part.core = {0};
  part.periphery = {1};
  part.followed_core = {{}};
  CHECK_THROWS_AS(initialize_beliefs(part, g), DataError);
}

TEST_CASE("pca on rank-one data keeps one axis and reconstructs exactly") {
  Matrix rows(5, 4);
  Eigen::RowVectorXd base(4);
  base << 1, 0, 1, 0;
  for (int i = 0; i < 5; ++i) rows.row(i) = base * (1.0 + i);
  PcaTransform pca = fit_pca(rows, 0.95);
  CHECK(pca.reduced_dim == 1);
  Matrix round = pca.inverse_transform(pca.transform(rows));
  CHECK((round - rows).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("full variance keeps the rank and round-trips") {
  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> uni(0, 1);
  Matrix rows(12, 5);
  for (int u = 0; u < 12; ++u)
    for (int i = 0; i < 5; ++i) rows(u, i) = uni(eng);
  PcaTransform pca = fit_pca(rows, 1.0);
  CHECK(pca.reduced_dim == 5);
  Matrix round = pca.inverse_transform(pca.transform(rows));
  CHECK((round - rows).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pca explained variance verified against an svd oracle") {
  std::mt19937_64 eng(20);
  std::bernoulli_distribution bit(0.4);
  Matrix rows(50, 20);
  for (int u = 0; u < 50; ++u)
    for (int i = 0; i < 20; ++i) rows(u, i) = bit(eng) ? 1.0 : 0.0;
  PcaTransform pca = fit_pca(rows, 0.95);
  CHECK(pca.explained_variance_ratio >= 0.95);

  // Oracle route: singular values of the centered matrix.
  Matrix centered = rows;
  centered.rowwise() -= rows.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  Eigen::VectorXd sv = svd.singularValues();
  std::vector<double> eig;
  for (int i = 0; i < sv.size(); ++i) eig.push_back(sv(i) * sv(i) / 49.0);
  std::sort(eig.rbegin(), eig.rend());
  double total = 0, kept = 0;
  for (double e : eig) total += e;
  for (int i = 0; i < pca.reduced_dim; ++i) kept += eig[i];
  CHECK(pca.explained_variance_ratio ==
        doctest::Approx(kept / total).epsilon(1e-9));
  for (int i = 0; i < pca.reduced_dim; ++i)
    CHECK(pca.axis_variance(i) == doctest::Approx(eig[i]).epsilon(1e-9));
  // Smallest dimension reaching the threshold.
  double partial = 0;
  int needed = 0;
  for (double e : eig) {
    partial += e;
    ++needed;
    if (partial / total >= 0.95) break;
  }
  CHECK(pca.reduced_dim == needed);
}

TEST_CASE("zero-variance input degenerates with a warning") {
  Matrix rows = Matrix::Constant(4, 3, 1.0);
  PcaTransform pca = fit_pca(rows, 0.95);
  CHECK(pca.degenerate);
  CHECK(pca.reduced_dim == 1);
}

TEST_CASE("mean-field step reproduces the worked three-agent update") {
  BeliefMatrix phi = beliefs_of(column({0, 1, 1}));
  BeliefMatrix next = inference_step(phi, 2, IndexMode::kExact, 0.0, phi);
  CHECK(next.phi(0, 0) == 0.5);
  CHECK(next.phi(1, 0) == 1.0);
  CHECK(next.phi(2, 0) == 1.0);
}

TEST_CASE("huge regularization pins the update to the initial state") {
  std::mt19937_64 eng(9);
  std::uniform_real_distribution<double> uni(0, 1);
  Matrix phi(8, 2), phi0(8, 2);
  for (int u = 0; u < 8; ++u)
    for (int i = 0; i < 2; ++i) {
      phi(u, i) = uni(eng);
      phi0(u, i) = uni(eng);
    }
  BeliefMatrix cur = beliefs_of(phi), init = beliefs_of(phi0);
  BeliefMatrix next = inference_step(cur, 3, IndexMode::kExact, 1e6, init);
  CHECK((next.phi - phi0).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("regularized update matches the recurrence oracle exactly") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> uni(0, 1);
  for (double alpha : {0.0, 1.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      int n = 5 + trial % 6, d = 1 + trial % 3;
      Matrix phi(n, d), phi0(n, d);
      for (int u = 0; u < n; ++u)
        for (int i = 0; i < d; ++i) {
          phi(u, i) = uni(eng);
          phi0(u, i) = uni(eng);
        }
      BeliefMatrix cur = beliefs_of(phi), init = beliefs_of(phi0);
      BeliefMatrix next = inference_step(cur, 3, IndexMode::kExact, alpha, init);
      Matrix oracle = recurrence_oracle(phi, phi0, 3, alpha);
      CHECK((next.phi - oracle).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("consensus start converges at time zero") {
  Instance inst = random_instance(4, 20, 3, 41);
  // overwrite labels so every core row is identical -> identical phi0
  for (int c : inst.part.core) inst.g.labels.row(c) = inst.g.labels.row(inst.part.core[0]);
  InferenceConfig cfg;
  cfg.k_policy = KPolicy::literal_k(3);
  cfg.pca = false;
  cfg.index_mode = IndexMode::kExact;
  InferenceResult res = run_inference(inst.part, inst.g, cfg);
  CHECK(res.trajectory.stopping_step == 0);
  CHECK(res.trajectory.converged);
  BeliefMatrix phi0 = initialize_beliefs(inst.part, inst.g);
  CHECK((res.beliefs.phi - phi0.phi).cwiseAbs().sum() == 0.0);
}

TEST_CASE("well-separated clusters of size k collapse to two values") {
  // Each cluster holds exactly k agents, so the neighbor set of every
  // member is its whole cluster and internal consensus is exact.
  Matrix phi0(6, 1);
  for (int i = 0; i < 3; ++i) phi0(i, 0) = 0.08 + 0.01 * i;
  for (int i = 3; i < 6; ++i) phi0(i, 0) = 0.88 + 0.01 * (i - 3);
  BeliefMatrix cur = beliefs_of(phi0), init = beliefs_of(phi0);
  for (int t = 0; t < 10; ++t)
    cur = inference_step(cur, 3, IndexMode::kExact, 0.0, init);
  double low = cur.phi.topRows(3).mean();
  double high = cur.phi.bottomRows(3).mean();
  CHECK((cur.phi.topRows(3).array() - low).abs().maxCoeff() == 0.0);
  CHECK((cur.phi.bottomRows(3).array() - high).abs().maxCoeff() == 0.0);
  CHECK(high - low > 0.5);
}

TEST_CASE("wider separated clusters never mix across the gap") {
  Matrix phi0(12, 1);
  for (int i = 0; i < 6; ++i) phi0(i, 0) = 0.08 + 0.01 * i;
  for (int i = 6; i < 12; ++i) phi0(i, 0) = 0.88 + 0.01 * (i - 6);
  BeliefMatrix cur = beliefs_of(phi0), init = beliefs_of(phi0);
  double gap = cur.phi.bottomRows(6).minCoeff() - cur.phi.topRows(6).maxCoeff();
  for (int t = 0; t < 60; ++t) {
    cur = inference_step(cur, 3, IndexMode::kExact, 0.0, init);
    double next_gap =
        cur.phi.bottomRows(6).minCoeff() - cur.phi.topRows(6).maxCoeff();
    CHECK(next_gap >= gap - 1e-12);  // split persists once formed
    gap = next_gap;
  }
  CHECK(cur.phi.topRows(6).maxCoeff() - cur.phi.topRows(6).minCoeff() < 0.05);
  CHECK(cur.phi.bottomRows(6).maxCoeff() - cur.phi.bottomRows(6).minCoeff() <
        0.05);
}

TEST_CASE("variational bound: closed form for a single user") {
  for (double v : {0.2, 0.5, 0.9}) {
    BeliefMatrix prev = beliefs_of(Matrix::Constant(1, 4, v));
    std::vector<NeighborSet> sets(1);
    sets[0].owner = 0;
    sets[0].neighbors = {{0, 0.0}};
    double vb = variational_bound(prev, prev, sets);
    double expect = 4.0 * (v * std::log(v) + (1 - v) * std::log(1 - v));
    CHECK(vb == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("variational bound matches a direct summation oracle") {
  Matrix prev(4, 1), next(4, 1);
  prev << 0.1, 0.4, 0.6, 0.9;
  next << 0.2, 0.5, 0.5, 0.8;
  BeliefMatrix p = beliefs_of(prev), q = beliefs_of(next);
  std::vector<NeighborSet> sets = exact_knn(prev, 2, Metric::kEuclidean);
  double direct = 0.0;
  for (int u = 0; u < 4; ++u)
    for (const auto& nb : sets[u].neighbors)
      direct += prev(nb.id, 0) * std::log(next(u, 0)) +
                (1 - prev(nb.id, 0)) * std::log(1 - next(u, 0));
  CHECK(variational_bound(p, q, sets) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("the neighbor-mean update maximizes the variational bound") {
  std::mt19937_64 eng(77);
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  std::normal_distribution<double> noise(0.0, 0.03);
  Matrix phi(6, 2);
  for (int u = 0; u < 6; ++u)
    for (int i = 0; i < 2; ++i) phi(u, i) = uni(eng);
  BeliefMatrix cur = beliefs_of(phi);
  std::vector<NeighborSet> sets;
  BeliefMatrix best =
      inference_step(cur, 3, IndexMode::kExact, 0.0, cur, {}, &sets);
  double vb_best = variational_bound(cur, best, sets);
  for (int trial = 0; trial < 50; ++trial) {
    BeliefMatrix perturbed = best;
    for (int u = 0; u < 6; ++u)
      for (int i = 0; i < 2; ++i)
        perturbed.phi(u, i) =
            std::clamp(perturbed.phi(u, i) + noise(eng), 1e-9, 1.0 - 1e-9);
    CHECK(variational_bound(cur, perturbed, sets) <= vb_best + 1e-12);
  }
}

TEST_CASE("beliefs stay inside the unit box without pca") {
  Instance inst = random_instance(6, 40, 4, 53);
  InferenceConfig cfg;
  cfg.k_policy = KPolicy::log();
  cfg.pca = false;
  cfg.index_mode = IndexMode::kExact;
  cfg.max_steps = 30;
  InferenceResult res = run_inference(inst.part, inst.g, cfg);
  CHECK(res.beliefs.phi.minCoeff() >= 0.0);
  CHECK(res.beliefs.phi.maxCoeff() <= 1.0);
  CHECK(res.macro.mu.size() == 4);
  CHECK((res.macro.mu.transpose() - res.beliefs.phi.colwise().mean())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("the full run with pca stays in range and reproduces itself") {
  Instance inst = random_instance(8, 50, 12, 67);
  InferenceConfig cfg;
  cfg.k_policy = KPolicy::log();
  cfg.pca = true;
  cfg.pca_variance = 0.9;
  cfg.index_mode = IndexMode::kLsh;
  cfg.trees = 4;
  cfg.max_steps = 25;
  InferenceResult a = run_inference(inst.part, inst.g, cfg);
  InferenceResult b = run_inference(inst.part, inst.g, cfg);
  REQUIRE(a.pca.has_value());
  CHECK(a.pca->reduced_dim <= 12);
  CHECK(a.pca->explained_variance_ratio >= 0.9);
  CHECK(a.beliefs.phi.minCoeff() >= 0.0);
  CHECK(a.beliefs.phi.maxCoeff() <= 1.0);
  CHECK_FALSE(a.beliefs.reduced);
  CHECK((a.beliefs.phi - b.beliefs.phi).cwiseAbs().sum() == 0.0);
  CHECK(a.trajectory.stopping_step == b.trajectory.stopping_step);
}

TEST_CASE("per-coordinate hull contracts monotonically at alpha zero") {
  std::mt19937_64 eng(91);
  std::uniform_real_distribution<double> uni(0, 1);
  for (int d : {1, 3}) {
    Matrix phi(14, d);
    for (int u = 0; u < 14; ++u)
      for (int i = 0; i < d; ++i) phi(u, i) = uni(eng);
    BeliefMatrix cur = beliefs_of(phi), init = beliefs_of(phi);
    for (int t = 0; t < 20; ++t) {
      Eigen::RowVectorXd lo = cur.phi.colwise().minCoeff();
      Eigen::RowVectorXd hi = cur.phi.colwise().maxCoeff();
      cur = inference_step(cur, 4, IndexMode::kExact, 0.0, init);
      for (int i = 0; i < d; ++i) {
        CHECK(cur.phi.col(i).minCoeff() >= lo(i) - 1e-12);
        CHECK(cur.phi.col(i).maxCoeff() <= hi(i) + 1e-12);
      }
    }
  }
}

TEST_CASE("1d ordering persists under the float path") {
  std::mt19937_64 eng(15);
  std::uniform_real_distribution<double> uni(0, 1);
  Matrix phi(10, 1);
  for (int u = 0; u < 10; ++u) phi(u, 0) = uni(eng);
  std::vector<int> order(10);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return phi(a, 0) < phi(b, 0); });
  BeliefMatrix cur = beliefs_of(phi), init = beliefs_of(phi);
  for (int t = 0; t < 25; ++t) {
    cur = inference_step(cur, 3, IndexMode::kExact, 0.0, init);
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      CHECK(cur.phi(order[i], 0) <= cur.phi(order[i + 1], 0) + 1e-15);
  }
}

TEST_CASE("k policies resolve with clamping") {
  CHECK(KPolicy::log().resolve(1000) == 7);
  CHECK(KPolicy::sqrt().resolve(100) == 10);
  CHECK(KPolicy::literal_k(5).resolve(3) == 3);
  CHECK(KPolicy::parse("log").kind == KPolicy::kLog);
  CHECK(KPolicy::parse("17").literal == 17);
  CHECK_THROWS_AS(KPolicy::parse("bogus"), ConfigError);
}
