#include "nnim/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "nnim/errors.hpp"
#include "nnim/inference.hpp"
#include "nnim/parallel.hpp"
#include "nnim/rng.hpp"

namespace nnim {

namespace {

/// Neighbors along edges in either direction, sorted unique.
std::vector<std::vector<int>> undirected_adj(const LabeledGraph& g) {
  std::vector<std::vector<int>> adj(g.num_nodes);
  for (int v = 0; v < g.num_nodes; ++v) {
    adj[v] = g.out_adj[v];
    adj[v].insert(adj[v].end(), g.in_adj[v].begin(), g.in_adj[v].end());
    std::sort(adj[v].begin(), adj[v].end());
    adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
  }
  return adj;
}

Matrix periphery_rows(const Matrix& all_rows, const CorePartition& part) {
  Matrix out(part.periphery.size(), all_rows.cols());
  for (std::size_t r = 0; r < part.periphery.size(); ++r)
    out.row(r) = all_rows.row(part.periphery[r]);
  return out;
}

}  // namespace

ScoreMatrix cf_bipartite(const CorePartition& part, const LabeledGraph& g) {
  BeliefMatrix init = initialize_beliefs(part, g, nullptr);
  return {std::move(init.phi), "cf-bipartite"};
}

ScoreMatrix cf_dynamic(const LabeledGraph& g, const CorePartition& part,
                       int max_steps, double D,
                       std::vector<double>* displacements) {
  const int n = g.num_nodes;
  const int d = g.label_dim;
  auto adj = undirected_adj(g);

  std::vector<char> is_core(n, 0);
  for (int c : part.core) is_core[c] = 1;
  std::vector<char> labeled(n, 0);
  for (int c : part.core) labeled[c] = 1;

  Matrix cur = Matrix::Constant(n, d, 0.5);
  for (int c : part.core) cur.row(c) = g.labels.row(c);

  for (int t = 0; t < max_steps; ++t) {
    Matrix next = cur;
    std::vector<char> next_labeled = labeled;
    parallel_for(n, [&](std::int64_t v) {
      if (is_core[v]) return;
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
      int cnt = 0;
      for (int w : adj[v])
        if (labeled[w]) {
          acc += cur.row(w);
          ++cnt;
        }
      if (cnt > 0) {
        next.row(v) = acc / cnt;
        next_labeled[v] = 1;
      }
    });
    double disp = displacement_l11(next, cur);
    if (displacements) displacements->push_back(disp);
    cur = std::move(next);
    labeled = std::move(next_labeled);
    if (disp <= D) break;
  }
  return {periphery_rows(cur, part), "cf-dynamic"};
}

ScoreMatrix label_propagation(const LabeledGraph& g, const CorePartition& part,
                              std::uint64_t seed, int max_sweeps,
                              int* unlabeled_rows) {
  const int n = g.num_nodes;
  const int d = g.label_dim;
  auto adj = undirected_adj(g);

  std::vector<char> is_core(n, 0);
  for (int c : part.core) is_core[c] = 1;
  std::vector<char> labeled(n, 0);
  for (int c : part.core) labeled[c] = 1;

  Matrix bits = Matrix::Zero(n, d);
  for (int c : part.core) bits.row(c) = g.labels.row(c);

  std::vector<int> order;
  for (int v = 0; v < n; ++v)
    if (!is_core[v]) order.push_back(v);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    auto eng = rng::engine(seed, rng::kLabelPropOrder, sweep);
    std::shuffle(order.begin(), order.end(), eng);
    bool changed = false;
    for (int v : order) {
      int cnt = 0;
      Eigen::RowVectorXd ones = Eigen::RowVectorXd::Zero(d);
      for (int w : adj[v])
        if (labeled[w]) {
          ones += bits.row(w);
          ++cnt;
        }
      if (cnt == 0) continue;
      for (int i = 0; i < d; ++i) {
        double zeros = cnt - ones(i);
        double bit;
        if (ones(i) > zeros)
          bit = 1.0;
        else if (ones(i) < zeros)
          bit = 0.0;
        else
          bit = rng::bernoulli(0.5, seed, rng::kLabelPropCoin, v, i, sweep)
                    ? 1.0
                    : 0.0;
        if (bit != bits(v, i)) {
          bits(v, i) = bit;
          changed = true;
        }
      }
      labeled[v] = 1;
    }
    if (!changed) break;
  }
  if (unlabeled_rows) {
    *unlabeled_rows = 0;
    for (int v : part.periphery) *unlabeled_rows += labeled[v] ? 0 : 1;
  }
  return {periphery_rows(bits, part), "label-prop"};
}

ScoreMatrix random_hk(const CorePartition& part, const LabeledGraph& g,
                      const RandomHkConfig& config,
                      std::vector<double>* displacements) {
  if (config.epsilon_radius < 0) throw ConfigError("radius must be >= 0");
  if (config.k < 1) throw ConfigError("k must be >= 1");

  Matrix phi = cf_bipartite(part, g).scores;
  const int n = static_cast<int>(phi.rows());
  const double r2 = config.epsilon_radius * config.epsilon_radius;

  for (int t = 0; t < config.max_steps; ++t) {
    Matrix next = phi;
    parallel_for(n, [&](std::int64_t u) {
      std::vector<int> ball;
      for (int v = 0; v < n; ++v)
        if ((phi.row(v) - phi.row(u)).squaredNorm() <= r2) ball.push_back(v);
      std::vector<int> chosen;
      if (static_cast<int>(ball.size()) <= config.k) {
        chosen = ball;
      } else {
        auto eng = rng::engine(config.seed, rng::kRandomHk, u, t);
        std::sample(ball.begin(), ball.end(), std::back_inserter(chosen),
                    config.k, eng);
      }
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(phi.cols());
      for (int v : chosen) acc += phi.row(v);
      next.row(u) = acc / static_cast<double>(chosen.size());
    });
    double disp = displacement_l11(next, phi);
    if (displacements) displacements->push_back(disp);
    phi = std::move(next);
    if (disp <= config.D) break;
  }
  return {std::move(phi), "random-hk"};
}

}  // namespace nnim
