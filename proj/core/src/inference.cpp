#include "nnim/inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "nnim/errors.hpp"
#include "nnim/parallel.hpp"
#include "nnim/rng.hpp"

namespace nnim {

Matrix PcaTransform::transform(const Matrix& rows) const {
  Matrix centered = rows;
  centered.rowwise() -= mean.transpose();
  return centered * axes;
}

Matrix PcaTransform::inverse_transform(const Matrix& rows) const {
  Matrix out = rows * axes.transpose();
  out.rowwise() += mean.transpose();
  return out;
}

PcaTransform fit_pca(const Matrix& core_labels, double variance_keep) {
  const int m = static_cast<int>(core_labels.rows());
  const int d = static_cast<int>(core_labels.cols());
  if (m < 2) throw ConfigError("pca needs at least 2 rows");
  if (variance_keep <= 0.0 || variance_keep > 1.0)
    throw ConfigError("variance_keep must be in (0, 1]");

  PcaTransform pca;
  pca.input_dim = d;
  pca.mean = core_labels.colwise().mean();
  Matrix centered = core_labels;
  centered.rowwise() -= pca.mean.transpose();

  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  Vector evals = solver.eigenvalues();  // ascending
  Eigen::MatrixXd evecs = solver.eigenvectors();

  double total = std::max(0.0, evals.sum());
  if (total <= 1e-12) {
    pca.degenerate = true;
    pca.reduced_dim = 1;
    pca.axes = evecs.col(d - 1);
    pca.axis_variance = Vector::Zero(1);
    pca.explained_variance_ratio = 1.0;
    return pca;
  }

  double tol = 1e-12 * evals(d - 1);
  double kept = 0.0;
  std::vector<int> order;  // descending eigenvalue index
  for (int i = d - 1; i >= 0; --i) order.push_back(i);
  int take = 0;
  for (int idx : order) {
    if (evals(idx) <= tol) break;
    kept += evals(idx);
    ++take;
    if (kept / total >= variance_keep - 1e-12) break;
  }
  take = std::max(take, 1);

  pca.reduced_dim = take;
  pca.axes.resize(d, take);
  pca.axis_variance.resize(take);
  for (int j = 0; j < take; ++j) {
    pca.axes.col(j) = evecs.col(order[j]);
    pca.axis_variance(j) = evals(order[j]);
  }
  pca.explained_variance_ratio = kept / total;
  return pca;
}

BeliefMatrix initialize_beliefs(const CorePartition& part,
                                const LabeledGraph& g,
                                const PcaTransform* pca) {
  const int n = static_cast<int>(part.periphery.size());
  const int d = pca ? pca->reduced_dim : g.label_dim;

  Matrix core_rows = pca ? pca->transform(g.labels) : g.labels;

  BeliefMatrix beliefs;
  beliefs.reduced = pca != nullptr;
  beliefs.phi.resize(n, d);
  for (int r = 0; r < n; ++r) {
    const auto& followed = part.followed_core[r];
    if (followed.empty())
      throw DataError("periphery node " +
                      std::to_string(part.periphery[r]) +
                      " follows no core member");
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (int c : followed) acc += core_rows.row(c);
    beliefs.phi.row(r) = acc / static_cast<double>(followed.size());
  }
  return beliefs;
}

BeliefMatrix inference_step(const BeliefMatrix& beliefs, int k,
                            IndexMode index_mode, double alpha,
                            const BeliefMatrix& phi0,
                            const LshForestConfig& lsh,
                            std::vector<NeighborSet>* sets_out,
                            KnnStats* stats) {
  if (alpha < 0) throw ConfigError("alpha must be >= 0");
  if (phi0.phi.rows() != beliefs.phi.rows())
    throw ConfigError("phi0 must be row-aligned with beliefs");
  const int n = static_cast<int>(beliefs.phi.rows());
  const int d = static_cast<int>(beliefs.phi.cols());

  std::vector<NeighborSet> sets;
  if (index_mode == IndexMode::kLsh) {
    LshForestConfig cfg = lsh;
    cfg.seed = rng::hash(cfg.seed, rng::kStep,
                         static_cast<std::uint64_t>(beliefs.t));
    LshForest forest(beliefs.phi, cfg);
    sets = forest.query_all(k, Metric::kEuclidean, stats);
  } else {
    sets = exact_knn(beliefs.phi, std::min(k, n), Metric::kEuclidean, stats);
  }

  BeliefMatrix next;
  next.reduced = beliefs.reduced;
  next.t = beliefs.t + 1;
  next.phi.resize(n, d);
  parallel_for(n, [&](std::int64_t u) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (const Neighbor& nb : sets[u].neighbors) acc += beliefs.phi.row(nb.id);
    acc += alpha * phi0.phi.row(u);
    next.phi.row(u) =
        acc / (static_cast<double>(sets[u].neighbors.size()) + alpha);
  });
  if (sets_out) *sets_out = std::move(sets);
  return next;
}

KPolicy KPolicy::parse(const std::string& text) {
  if (text == "log") return KPolicy::log();
  if (text == "sqrt") return KPolicy::sqrt();
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || v < 1)
    throw ConfigError("k policy must be 'log', 'sqrt' or a positive integer");
  return KPolicy::literal_k(v);
}

int KPolicy::resolve(int n) const {
  int k = 1;
  switch (kind) {
    case kLog:
      k = static_cast<int>(
          std::ceil(std::log(static_cast<double>(std::max(2, n)))));
      break;
    case kSqrt:
      k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
      break;
    case kLiteral:
      k = literal;
      break;
  }
  return std::clamp(k, 1, std::max(1, n));
}

InferenceResult run_inference(const CorePartition& part, const LabeledGraph& g,
                              const InferenceConfig& config) {
  InferenceResult result;
  const int n = static_cast<int>(part.periphery.size());
  if (n == 0) throw DataError("empty periphery");
  result.k = config.k_policy.resolve(n);

  if (config.pca) {
    Matrix core_labels(part.core.size(), g.label_dim);
    for (std::size_t i = 0; i < part.core.size(); ++i)
      core_labels.row(i) = g.labels.row(part.core[i]);
    result.pca = fit_pca(core_labels, config.pca_variance);
  }
  const PcaTransform* pca = result.pca ? &*result.pca : nullptr;

  BeliefMatrix phi0 = initialize_beliefs(part, g, pca);
  BeliefMatrix state = phi0;

  LshForestConfig lsh{config.trees, config.leaf_capacity, config.seed};
  Trajectory& traj = result.trajectory;
  for (int t = 0; t < config.max_steps; ++t) {
    BeliefMatrix next = inference_step(state, result.k, config.index_mode,
                                       config.alpha, phi0, lsh);
    double disp = displacement_l11(next.phi, state.phi);
    if (t == 0 && disp == 0.0) {
      traj.converged = true;
      traj.stopping_step = 0;
      break;
    }
    state = std::move(next);
    traj.displacement.push_back(disp);
    traj.macro_norm.push_back(state.phi.colwise().mean().norm());
    traj.stopping_step = t + 1;
    if (disp <= config.D) {
      traj.converged = true;
      break;
    }
  }

  if (pca) {
    state.phi = pca->inverse_transform(state.phi);
    state.phi = state.phi.cwiseMax(0.0).cwiseMin(1.0);
    state.reduced = false;
  }
  result.macro.mu = state.phi.colwise().mean();
  result.beliefs = std::move(state);
  return result;
}

double variational_bound(const BeliefMatrix& prev, const BeliefMatrix& next,
                         const std::vector<NeighborSet>& neighbor_sets) {
  constexpr double kTheta = 1e-12;
  const int n = static_cast<int>(prev.phi.rows());
  const int d = static_cast<int>(prev.phi.cols());
  double total = 0.0;
  for (int u = 0; u < n; ++u) {
    for (const Neighbor& nb : neighbor_sets[u].neighbors) {
      for (int i = 0; i < d; ++i) {
        double p = std::clamp(next.phi(u, i), kTheta, 1.0 - kTheta);
        double q = prev.phi(nb.id, i);
        total += q * std::log(p) + (1.0 - q) * std::log(1.0 - p);
      }
    }
  }
  return total;
}

}  // namespace nnim
