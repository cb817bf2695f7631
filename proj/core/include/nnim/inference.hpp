#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnim/core_extract.hpp"
#include "nnim/dynamics.hpp"
#include "nnim/graph.hpp"
#include "nnim/knn.hpp"
#include "nnim/types.hpp"

namespace nnim {

/// Variational parameters of the periphery, one row per periphery member in
/// partition order. `reduced` marks PCA space, where the [0,1] range does
/// not apply.
struct BeliefMatrix {
  Matrix phi;
  bool reduced = false;
  int t = 0;
};

struct MacroState {
  Vector mu;  // column mean of phi in original space
};

/// Centered principal-axis transform fitted on core label rows.
struct PcaTransform {
  Vector mean;
  Eigen::MatrixXd axes;  // d x d', orthonormal columns
  Vector axis_variance;  // d' retained eigenvalues
  double explained_variance_ratio = 1.0;
  int input_dim = 0;
  int reduced_dim = 0;
  bool degenerate = false;  // zero-variance input

  Matrix transform(const Matrix& rows) const;
  Matrix inverse_transform(const Matrix& rows) const;
};

/// Principal axes of the core rows keeping at least `variance_keep` of the
/// total variance. Zero-variance input degenerates to one arbitrary axis.
PcaTransform fit_pca(const Matrix& core_labels, double variance_keep);

/// phi_u(0) = mean label vector of the core members u follows (reduced
/// vectors when a transform is given). A periphery row with no followed
/// cores is a hard error; extraction must have excluded it.
BeliefMatrix initialize_beliefs(const CorePartition& part,
                                const LabeledGraph& g,
                                const PcaTransform* pca = nullptr);

enum class IndexMode { kExact, kLsh };

/// phi_u <- (sum of k-NN rows + alpha * phi0_u) / (k + alpha), neighbor sets
/// under Euclidean distance over the current phi, self included. The lsh
/// seed is re-derived from the step counter so reruns are reproducible.
BeliefMatrix inference_step(const BeliefMatrix& beliefs, int k,
                            IndexMode index_mode, double alpha,
                            const BeliefMatrix& phi0,
                            const LshForestConfig& lsh = {},
                            std::vector<NeighborSet>* sets_out = nullptr,
                            KnnStats* stats = nullptr);

struct KPolicy {
  enum Kind { kLog, kSqrt, kLiteral } kind = kLog;
  int literal = 0;

  static KPolicy log() { return {kLog, 0}; }
  static KPolicy sqrt() { return {kSqrt, 0}; }
  static KPolicy literal_k(int k) { return {kLiteral, k}; }
  /// Parses "log" | "sqrt" | a positive integer.
  static KPolicy parse(const std::string& text);

  int resolve(int n) const;
};

struct InferenceConfig {
  KPolicy k_policy;
  double D = 1e-3;
  int max_steps = 100;
  double alpha = 0.0;
  bool pca = true;
  double pca_variance = 0.95;
  IndexMode index_mode = IndexMode::kLsh;
  int trees = 10;
  int leaf_capacity = 64;
  std::uint64_t seed = 17;
};

struct InferenceResult {
  BeliefMatrix beliefs;  // original space, clipped to [0,1]
  MacroState macro;
  Trajectory trajectory;
  std::optional<PcaTransform> pca;
  int k = 0;
};

/// Full pipeline of the mean-field method: initialize from followed cores
/// (optionally in PCA space), iterate inference_step until the entrywise L1
/// displacement falls to D or max_steps, inverse-transform and clip, then
/// take column means as the macroscopic parameters.
InferenceResult run_inference(const CorePartition& part, const LabeledGraph& g,
                              const InferenceConfig& config);

/// Sum over users and their neighbors of the Bernoulli cross-entropy between
/// the previous neighbor rows and the next own row. Diagnostic; next entries
/// are clamped to [1e-12, 1 - 1e-12] for the logs.
double variational_bound(const BeliefMatrix& prev, const BeliefMatrix& next,
                         const std::vector<NeighborSet>& neighbor_sets);

}  // namespace nnim
