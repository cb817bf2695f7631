#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nnim/graph.hpp"
#include "nnim/knn.hpp"
#include "nnim/types.hpp"

namespace nnim {

/// State of the stochastic process: binary realizations X and the Bernoulli
/// parameters xi they were drawn from.
struct OpinionState {
  Matrix X;   // |U| x d, entries in {0, 1}
  Matrix xi;  // |U| x d, entries in [0, 1]
  int t = 0;
};

/// Per-run record. `displacement[s]` is the entrywise L1 move of the
/// parameter matrix made by executed step s+1; `macro_norm[s]` is the L2
/// norm of the column-mean parameter vector after that step.
struct Trajectory {
  std::vector<double> displacement;
  std::vector<double> macro_norm;
  int stopping_step = 0;
  bool converged = false;
};

struct NnimOptions {
  bool use_lsh = false;
  LshForestConfig lsh;
  /// Test/replay hook: when set and it returns true, `X` (already sized)
  /// holds the realization to use for step t instead of sampling.
  std::function<bool(int t, Matrix& X)> realization_override;
  std::function<void(const OpinionState&)> snapshot;
  int snapshot_every = 0;
};

/// One round: Hamming k-NN sets over X (self included, ties by id), neighbor
/// means into xi', Bernoulli resample of X'. Each coordinate's draw depends
/// only on (seed, u, i, t+1).
OpinionState nnim_step(const OpinionState& state, int k, std::uint64_t seed,
                       const NnimOptions& opts = {});

/// Samples X0 ~ Be(xi0) and iterates nnim_step until the parameter
/// displacement falls to epsilon or max_steps is hit. The stopping step
/// counts executed rounds; a start whose first computed update moves nothing
/// reports 0 without executing a round.
std::pair<OpinionState, Trajectory> run_nnim(const Matrix& xi0, int k,
                                             double epsilon, int max_steps,
                                             std::uint64_t seed,
                                             const NnimOptions& opts = {});

/// Per-node neighbor count rule for the homophilic index.
struct HiPolicy {
  enum Kind { kOutDegreePlusOne, kCeilLog, kLiteral } kind = kOutDegreePlusOne;
  int literal = 0;

  static HiPolicy out_degree_plus_one() { return {kOutDegreePlusOne, 0}; }
  static HiPolicy ceil_log() { return {kCeilLog, 0}; }
  static HiPolicy literal_k(int k) { return {kLiteral, k}; }
};

/// Degree-weighted agreement (in percent) between each node's followed
/// neighborhood label mean and its k-nearest-neighbor label mean, over all
/// nodes of the graph.
double homophilic_index(const LabeledGraph& g, const HiPolicy& policy);

}  // namespace nnim
