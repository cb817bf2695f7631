#include "nnim/knn.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <optional>

#include "nnim/errors.hpp"
#include "nnim/parallel.hpp"
#include "nnim/rng.hpp"

namespace nnim {

namespace {

/// Bit-packed rows for fast Hamming scans. Entries must be exactly 0 or 1.
struct PackedBits {
  int words = 0;
  std::vector<std::uint64_t> data;

  PackedBits(const Matrix& points) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    words = (d + 63) / 64;
    data.assign(static_cast<std::size_t>(n) * words, 0);
    for (int u = 0; u < n; ++u)
      for (int i = 0; i < d; ++i)
        if (points(u, i) != 0.0)
          data[static_cast<std::size_t>(u) * words + i / 64] |=
              std::uint64_t{1} << (i % 64);
  }

  int dist(int u, int v) const {
    const std::uint64_t* a = data.data() + static_cast<std::size_t>(u) * words;
    const std::uint64_t* b = data.data() + static_cast<std::size_t>(v) * words;
    int h = 0;
    for (int w = 0; w < words; ++w) h += std::popcount(a[w] ^ b[w]);
    return h;
  }
};

/// Selects the owner plus the (k-1) smallest (distance, id) keys among
/// `candidates` (owner excluded there), returning a sorted NeighborSet.
NeighborSet select_k(int owner, int k, std::vector<Neighbor>& candidates) {
  NeighborSet set;
  set.owner = owner;
  auto by_dist_id = [](const Neighbor& a, const Neighbor& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  };
  int take = std::min<int>(k - 1, static_cast<int>(candidates.size()));
  if (take > 0 && take < static_cast<int>(candidates.size()))
    std::nth_element(candidates.begin(), candidates.begin() + take - 1,
                     candidates.end(), by_dist_id);
  set.neighbors.assign(candidates.begin(), candidates.begin() + take);
  set.neighbors.push_back({owner, 0.0});
  std::sort(set.neighbors.begin(), set.neighbors.end(), by_dist_id);
  return set;
}

std::vector<NeighborSet> exact_impl(const Matrix& points,
                                    const std::vector<int>& ks, Metric metric,
                                    KnnStats* stats) {
  const int n = static_cast<int>(points.rows());
  std::vector<NeighborSet> out(n);
  if (n == 0) return out;

  bool clamped = false;
  for (int k : ks)
    if (k > n) clamped = true;

  std::atomic<std::int64_t> evals{0};
  if (metric == Metric::kHamming) {
    PackedBits bits(points);
    parallel_for(n, [&](std::int64_t u) {
      std::vector<Neighbor> cand;
      cand.reserve(n - 1);
      for (int v = 0; v < n; ++v)
        if (v != static_cast<int>(u))
          cand.push_back({v, static_cast<double>(bits.dist(u, v))});
      out[u] = select_k(static_cast<int>(u), std::min(ks[u], n), cand);
      evals.fetch_add(n, std::memory_order_relaxed);
    });
  } else {
    parallel_for(n, [&](std::int64_t u) {
      std::vector<Neighbor> cand;
      cand.reserve(n - 1);
      for (int v = 0; v < n; ++v) {
        if (v == static_cast<int>(u)) continue;
        double d2 = (points.row(u) - points.row(v)).squaredNorm();
        cand.push_back({v, d2});
      }
      out[u] = select_k(static_cast<int>(u), std::min(ks[u], n), cand);
      for (auto& nb : out[u].neighbors) nb.dist = std::sqrt(nb.dist);
      evals.fetch_add(n, std::memory_order_relaxed);
    });
  }
  if (stats) {
    stats->distance_evals += evals.load();
    stats->k_clamped = stats->k_clamped || clamped;
  }
  return out;
}

}  // namespace

std::vector<NeighborSet> exact_knn(const Matrix& points, int k, Metric metric,
                                   KnnStats* stats) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<int> ks(points.rows(), k);
  return exact_impl(points, ks, metric, stats);
}

std::vector<NeighborSet> exact_knn_variable(const Matrix& points,
                                            const std::vector<int>& ks,
                                            Metric metric, KnnStats* stats) {
  if (static_cast<int>(ks.size()) != points.rows())
    throw ConfigError("ks size must match point count");
  for (int k : ks)
    if (k < 1) throw ConfigError("k must be >= 1");
  return exact_impl(points, ks, metric, stats);
}

LshForest::LshForest(const Matrix& points, LshForestConfig config)
    : points_(&points),
      config_(config),
      n_(static_cast<int>(points.rows())) {
  if (config_.trees < 1) throw ConfigError("lsh forest needs >= 1 tree");
  if (config_.leaf_capacity < 1) throw ConfigError("leaf capacity must be >= 1");
  trees_.resize(config_.trees);
  parallel_for(config_.trees, [&](std::int64_t t) {
    build_tree(static_cast<int>(t), trees_[t]);
  });
}

void LshForest::build_tree(int tree_index, Tree& tree) {
  const Matrix& pts = *points_;
  const int d = static_cast<int>(pts.cols());
  tree.perm.resize(n_);
  for (int i = 0; i < n_; ++i) tree.perm[i] = i;
  tree.leaf_of.assign(n_, -1);

  int node_counter = 0;
  std::vector<double> proj(n_);

  // Depth-capped recursive median split; a span where every projection ties
  // becomes a leaf regardless of size.
  std::function<void(int, int, int)> split = [&](int lo, int hi, int depth) {
    if (hi - lo <= config_.leaf_capacity || depth > 48) {
      int leaf = static_cast<int>(tree.leaves.size());
      tree.leaves.emplace_back(lo, hi);
      for (int i = lo; i < hi; ++i) tree.leaf_of[tree.perm[i]] = leaf;
      return;
    }
    int node = node_counter++;
    Vector dir(d);
    for (int j = 0; j < d; ++j) {
      // Box-Muller from two counter lookups.
      double u1 = rng::uniform01(config_.seed, rng::kLshTree, tree_index,
                                 node * 2 + 0, j);
      double u2 = rng::uniform01(config_.seed, rng::kLshTree, tree_index,
                                 node * 2 + 1, j);
      u1 = std::max(u1, 1e-300);
      dir[j] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    for (int i = lo; i < hi; ++i) proj[tree.perm[i]] = pts.row(tree.perm[i]).dot(dir);
    std::sort(tree.perm.begin() + lo, tree.perm.begin() + hi, [&](int a, int b) {
      return proj[a] != proj[b] ? proj[a] < proj[b] : a < b;
    });
    if (proj[tree.perm[lo]] == proj[tree.perm[hi - 1]]) {
      int leaf = static_cast<int>(tree.leaves.size());
      tree.leaves.emplace_back(lo, hi);
      for (int i = lo; i < hi; ++i) tree.leaf_of[tree.perm[i]] = leaf;
      return;
    }
    int mid = lo + (hi - lo) / 2;
    split(lo, mid, depth + 1);
    split(mid, hi, depth + 1);
  };
  split(0, n_, 0);
}

std::vector<NeighborSet> LshForest::query_all(int k, Metric metric,
                                              KnnStats* stats) const {
  if (k < 1) throw ConfigError("k must be >= 1");
  const Matrix& pts = *points_;
  std::vector<NeighborSet> out(n_);
  if (n_ == 0) return out;
  const int k_eff = std::min(k, n_);

  std::optional<PackedBits> bits;
  if (metric == Metric::kHamming) bits.emplace(pts);

  std::atomic<std::int64_t> evals{0}, backfilled{0};
  parallel_for(n_, [&](std::int64_t ui) {
    int u = static_cast<int>(ui);
    std::vector<int> cand;
    for (const Tree& tree : trees_) {
      auto [lo, hi] = tree.leaves[tree.leaf_of[u]];
      cand.insert(cand.end(), tree.perm.begin() + lo, tree.perm.begin() + hi);
    }
    cand.push_back(u);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    if (static_cast<int>(cand.size()) < k_eff) {
      auto eng = rng::engine(config_.seed, rng::kLshBackfill, u);
      std::uniform_int_distribution<int> pick(0, n_ - 1);
      std::vector<int> extra;
      std::int64_t added = 0;
      while (static_cast<int>(cand.size()) + added < k_eff) {
        int v = pick(eng);
        bool dup = std::binary_search(cand.begin(), cand.end(), v) ||
                   std::find(extra.begin(), extra.end(), v) != extra.end();
        if (!dup) {
          extra.push_back(v);
          ++added;
        }
      }
      cand.insert(cand.end(), extra.begin(), extra.end());
      backfilled.fetch_add(added, std::memory_order_relaxed);
    }

    std::vector<Neighbor> scored;
    scored.reserve(cand.size());
    for (int v : cand) {
      if (v == u) continue;
      double dist = bits ? static_cast<double>(bits->dist(u, v))
                         : (pts.row(u) - pts.row(v)).squaredNorm();
      scored.push_back({v, dist});
    }
    evals.fetch_add(static_cast<std::int64_t>(cand.size()),
                    std::memory_order_relaxed);
    out[u] = select_k(u, k_eff, scored);
    if (!bits)
      for (auto& nb : out[u].neighbors) nb.dist = std::sqrt(nb.dist);
  });

  if (stats) {
    stats->distance_evals += evals.load();
    stats->backfilled += backfilled.load();
    stats->k_clamped = stats->k_clamped || k > n_;
  }
  return out;
}

}  // namespace nnim
