#pragma once

#include <cstdint>
#include <vector>

#include "nnim/types.hpp"

namespace nnim {

enum class Metric { kHamming, kEuclidean };

struct Neighbor {
  int id;
  double dist;
};

/// One user's neighbor set: exactly min(k, n) entries, the owner always
/// included, sorted by (distance, id) ascending.
struct NeighborSet {
  int owner = -1;
  std::vector<Neighbor> neighbors;

  bool contains(int id) const {
    for (const auto& nb : neighbors)
      if (nb.id == id) return true;
    return false;
  }
};

struct KnnStats {
  std::int64_t distance_evals = 0;
  std::int64_t backfilled = 0;
  bool k_clamped = false;
};

/// Exact k-nearest-neighbor sets for every row of `points`. The owner is
/// force-included; the remaining k-1 slots go to the smallest (distance, id)
/// keys among the other rows. k > n clamps to n and flags the stats.
std::vector<NeighborSet> exact_knn(const Matrix& points, int k, Metric metric,
                                   KnnStats* stats = nullptr);

/// Per-row neighbor counts; ks[u] plays the role of k for row u.
std::vector<NeighborSet> exact_knn_variable(const Matrix& points,
                                            const std::vector<int>& ks,
                                            Metric metric,
                                            KnnStats* stats = nullptr);

struct LshForestConfig {
  int trees = 10;
  int leaf_capacity = 64;
  std::uint64_t seed = 17;
};

/// Forest of randomized-hyperplane partition trees. Each tree recursively
/// median-splits the point set along random directions until leaves hold at
/// most leaf_capacity points. A query's candidate pool is the union of its
/// leaves across trees, re-ranked exactly.
///
/// The forest keeps a reference to `points`; it must outlive the forest.
class LshForest {
 public:
  LshForest(const Matrix& points, LshForestConfig config);

  /// Approximate neighbor sets for all indexed points. Deterministic given
  /// the build seed. Pools smaller than k are backfilled with seeded random
  /// distinct ids and counted in stats.
  std::vector<NeighborSet> query_all(int k, Metric metric,
                                     KnnStats* stats = nullptr) const;

  int num_points() const { return n_; }

 private:
  struct Tree {
    std::vector<int> perm;                      // points grouped by leaf
    std::vector<std::pair<int, int>> leaves;    // [lo, hi) spans into perm
    std::vector<int> leaf_of;                   // point -> leaf index
  };

  void build_tree(int tree_index, Tree& tree);

  const Matrix* points_;
  LshForestConfig config_;
  int n_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace nnim
