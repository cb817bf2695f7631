#include "nnim/dynamics.hpp"

#include <cmath>

#include "nnim/errors.hpp"
#include "nnim/parallel.hpp"
#include "nnim/rng.hpp"

namespace nnim {

namespace {

std::vector<NeighborSet> hamming_knn(const Matrix& X, int k,
                                     const NnimOptions& opts,
                                     std::uint64_t seed, int t) {
  if (opts.use_lsh) {
    LshForestConfig cfg = opts.lsh;
    cfg.seed = rng::hash(seed, rng::kStep, static_cast<std::uint64_t>(t));
    LshForest forest(X, cfg);
    return forest.query_all(k, Metric::kHamming);
  }
  return exact_knn(X, k, Metric::kHamming);
}

void sample_realization(Matrix& X, const Matrix& xi, std::uint64_t seed,
                        int t) {
  const int n = static_cast<int>(xi.rows());
  const int d = static_cast<int>(xi.cols());
  parallel_for(n, [&](std::int64_t u) {
    for (int i = 0; i < d; ++i)
      X(u, i) = rng::bernoulli(xi(u, i), seed, rng::kOpinionDraw, u, i, t)
                    ? 1.0
                    : 0.0;
  });
}

}  // namespace

OpinionState nnim_step(const OpinionState& state, int k, std::uint64_t seed,
                       const NnimOptions& opts) {
  const int n = static_cast<int>(state.X.rows());
  const int d = static_cast<int>(state.X.cols());
  if (k < 1 || k > n) throw ConfigError("nnim_step requires 1 <= k <= |U|");

  auto sets = hamming_knn(state.X, k, opts, seed, state.t);

  OpinionState next;
  next.t = state.t + 1;
  next.xi.resize(n, d);
  parallel_for(n, [&](std::int64_t u) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (const Neighbor& nb : sets[u].neighbors) acc += state.X.row(nb.id);
    next.xi.row(u) = acc / static_cast<double>(sets[u].neighbors.size());
  });

  next.X.resize(n, d);
  if (!(opts.realization_override &&
        opts.realization_override(next.t, next.X)))
    sample_realization(next.X, next.xi, seed, next.t);
  return next;
}

std::pair<OpinionState, Trajectory> run_nnim(const Matrix& xi0, int k,
                                             double epsilon, int max_steps,
                                             std::uint64_t seed,
                                             const NnimOptions& opts) {
  if (epsilon < 0) throw ConfigError("epsilon must be >= 0");
  if ((xi0.array() < 0.0).any() || (xi0.array() > 1.0).any())
    throw ConfigError("initial parameters must lie in [0, 1]");

  OpinionState state;
  state.t = 0;
  state.xi = xi0;
  state.X.resize(xi0.rows(), xi0.cols());
  if (!(opts.realization_override && opts.realization_override(0, state.X)))
    sample_realization(state.X, state.xi, seed, 0);

  Trajectory traj;
  for (int t = 0; t < max_steps; ++t) {
    OpinionState next = nnim_step(state, k, seed, opts);
    double disp = displacement_l11(next.xi, state.xi);
    if (t == 0 && disp == 0.0) {
      // The expected update leaves the start untouched: converged at time 0.
      traj.converged = true;
      traj.stopping_step = 0;
      return {std::move(state), std::move(traj)};
    }
    state = std::move(next);
    traj.displacement.push_back(disp);
    traj.macro_norm.push_back(state.xi.colwise().mean().norm());
    traj.stopping_step = t + 1;
    if (opts.snapshot && opts.snapshot_every > 0 &&
        state.t % opts.snapshot_every == 0)
      opts.snapshot(state);
    if (disp <= epsilon) {
      traj.converged = true;
      break;
    }
  }
  return {std::move(state), std::move(traj)};
}

double homophilic_index(const LabeledGraph& g, const HiPolicy& policy) {
  const int n = g.num_nodes;
  const int d = g.label_dim;
  if (n == 0) throw DataError("homophilic index of an empty graph");

  std::vector<int> ks(n, 1);
  switch (policy.kind) {
    case HiPolicy::kOutDegreePlusOne:
      for (int w = 0; w < n; ++w) ks[w] = g.out_degree(w) + 1;
      break;
    case HiPolicy::kCeilLog: {
      int k = std::max(1, static_cast<int>(std::ceil(std::log(
                              static_cast<double>(std::max(2, n))))));
      ks.assign(n, std::min(k, n));
      break;
    }
    case HiPolicy::kLiteral:
      if (policy.literal < 1) throw ConfigError("literal k must be >= 1");
      ks.assign(n, std::min(policy.literal, n));
      break;
  }
  for (int& k : ks) k = std::min(k, n);

  auto sets = exact_knn_variable(g.labels, ks, Metric::kHamming);

  std::int64_t total_weight_num = 0;  // sum of (1 + outdeg) = N + |E|
  for (int w = 0; w < n; ++w) total_weight_num += 1 + g.out_degree(w);

  std::vector<double> rmse(n, 0.0);
  parallel_for(n, [&](std::int64_t wi) {
    int w = static_cast<int>(wi);
    Eigen::RowVectorXd alpha = g.labels.row(w);
    for (int v : g.out_adj[w]) alpha += g.labels.row(v);
    alpha /= static_cast<double>(g.out_degree(w) + 1);

    Eigen::RowVectorXd beta = Eigen::RowVectorXd::Zero(d);
    for (const Neighbor& nb : sets[w].neighbors) beta += g.labels.row(nb.id);
    beta /= static_cast<double>(sets[w].neighbors.size());

    rmse[w] = (alpha - beta).norm() / std::sqrt(static_cast<double>(d));
  });

  double weighted = 0.0;
  for (int w = 0; w < n; ++w)
    weighted += (1.0 + g.out_degree(w)) / static_cast<double>(total_weight_num) *
                rmse[w];
  return 100.0 * (1.0 - weighted);
}

}  // namespace nnim
