#pragma once

#include <cstdint>
#include <string>

#include "nnim/core_extract.hpp"
#include "nnim/graph.hpp"
#include "nnim/types.hpp"

namespace nnim {

/// Prediction output: one row per periphery member in partition order,
/// entries in [0, 1].
struct ScoreMatrix {
  Matrix scores;
  std::string method;
};

/// Mean label vector of the followed core members; the static baseline and
/// also the initialization of the dynamics.
ScoreMatrix cf_bipartite(const CorePartition& part, const LabeledGraph& g);

/// Whole-network propagation: cores hold fixed labels, every other node
/// repeatedly takes the mean over its currently labeled neighbors (edges in
/// either direction) until the move falls to D or max_steps. Nodes never
/// reached keep the 0.5 prior. Per-step displacements are appended to
/// `displacements` when given.
ScoreMatrix cf_dynamic(const LabeledGraph& g, const CorePartition& part,
                       int max_steps, double D,
                       std::vector<double>* displacements = nullptr);

/// Core-seeded asynchronous majority-bit propagation, one coordinate at a
/// time; ties resolved by seeded coin. Output is binary. Periphery rows
/// that never receive a label stay all-zero and are counted.
ScoreMatrix label_propagation(const LabeledGraph& g, const CorePartition& part,
                              std::uint64_t seed, int max_sweeps = 100,
                              int* unlabeled_rows = nullptr);

struct RandomHkConfig {
  int k = 1;
  double epsilon_radius = 0.0;
  double D = 1e-3;
  int max_steps = 100;
  std::uint64_t seed = 17;
};

/// Bounded-confidence dynamics with random neighbor choice: each user
/// averages a uniform k-subset of the users within epsilon_radius of her
/// current row (all of them when fewer than k).
ScoreMatrix random_hk(const CorePartition& part, const LabeledGraph& g,
                      const RandomHkConfig& config,
                      std::vector<double>* displacements = nullptr);

}  // namespace nnim
