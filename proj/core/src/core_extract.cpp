#include "nnim/core_extract.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "nnim/errors.hpp"

namespace nnim {

namespace {

struct Candidate {
  std::int64_t gain;
  int in_degree;
  int id;
  bool operator<(const Candidate& o) const {
    // max-heap: higher gain, then higher in-degree, then lower id
    return std::tie(gain, in_degree) == std::tie(o.gain, o.in_degree)
               ? id > o.id
               : std::tie(gain, in_degree) < std::tie(o.gain, o.in_degree);
  }
};

std::int64_t marginal_gain(const LabeledGraph& g, int c,
                           const std::vector<char>& engaged,
                           const std::vector<char>& covered) {
  std::int64_t gain = engaged[c] && !covered[c] ? 1 : 0;
  for (int u : g.in_adj[c])
    if (engaged[u] && !covered[u]) ++gain;
  return gain;
}

CorePartition finalize(const LabeledGraph& g, std::vector<int> core,
                       const std::vector<char>& engaged,
                       const std::vector<char>& covered,
                       std::int64_t engaged_count, bool budget_warning) {
  CorePartition part;
  part.core = std::move(core);
  part.budget_warning = budget_warning;
  part.engaged_count = engaged_count;

  std::vector<char> in_core(g.num_nodes, 0);
  for (int c : part.core) in_core[c] = 1;

  for (int v = 0; v < g.num_nodes; ++v) {
    if (!engaged[v]) continue;
    if (covered[v]) {
      ++part.covered_engaged_count;
      if (!in_core[v]) part.periphery.push_back(v);
    } else {
      part.uncovered_engaged.push_back(v);
    }
  }

  part.followed_core.resize(part.periphery.size());
  for (std::size_t r = 0; r < part.periphery.size(); ++r) {
    for (int c : g.out_adj[part.periphery[r]])
      if (in_core[c]) part.followed_core[r].push_back(c);
    part.bipartite_edges +=
        static_cast<std::int64_t>(part.followed_core[r].size());
  }

  part.coverage_fraction =
      engaged_count == 0
          ? 1.0
          : static_cast<double>(part.covered_engaged_count) / engaged_count;
  part.core_fraction = g.num_nodes == 0
                           ? 0.0
                           : static_cast<double>(part.core.size()) / g.num_nodes;
  std::int64_t edges = g.num_edges();
  part.bipartite_edge_fraction =
      edges == 0 ? 0.0 : static_cast<double>(part.bipartite_edges) / edges;
  return part;
}

/// Greedy maximum coverage restricted to a bucket schedule given as
/// cumulative cut points into the in-degree-sorted node order.
CorePartition bucketed_greedy(const LabeledGraph& g, int K, int tau,
                              const std::vector<int>& cuts) {
  const int n = g.num_nodes;
  std::vector<char> engaged(n, 0), covered(n, 0);
  std::int64_t engaged_count = 0;
  for (int v = 0; v < n; ++v)
    if (g.out_degree(v) >= tau) {
      engaged[v] = 1;
      ++engaged_count;
    }

  if (K >= n) {
    // Degenerate budget: everything is core, every engaged node covers itself.
    std::vector<int> core(n);
    for (int v = 0; v < n; ++v) core[v] = v;
    std::vector<char> all_covered(n, 0);
    for (int v = 0; v < n; ++v)
      if (engaged[v]) all_covered[v] = 1;
    return finalize(g, std::move(core), engaged, all_covered, engaged_count,
                    /*budget_warning=*/true);
  }

  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int da = g.in_degree(a), db = g.in_degree(b);
    return da != db ? da > db : a < b;
  });

  std::vector<int> core;
  std::int64_t covered_count = 0;
  int prev_cut = 0;
  for (int cut : cuts) {
    if (static_cast<int>(core.size()) >= K || covered_count == engaged_count)
      break;
    std::priority_queue<Candidate> heap;
    for (int i = prev_cut; i < cut; ++i) {
      int c = order[i];
      std::int64_t gain = marginal_gain(g, c, engaged, covered);
      if (gain > 0) heap.push({gain, g.in_degree(c), c});
    }
    prev_cut = cut;
    while (!heap.empty() && static_cast<int>(core.size()) < K &&
           covered_count < engaged_count) {
      Candidate top = heap.top();
      heap.pop();
      std::int64_t fresh = marginal_gain(g, top.id, engaged, covered);
      if (fresh != top.gain) {
        if (fresh > 0) heap.push({fresh, top.in_degree, top.id});
        continue;
      }
      core.push_back(top.id);
      if (engaged[top.id] && !covered[top.id]) {
        covered[top.id] = 1;
        ++covered_count;
      }
      for (int u : g.in_adj[top.id])
        if (engaged[u] && !covered[u]) {
          covered[u] = 1;
          ++covered_count;
        }
    }
  }

  return finalize(g, std::move(core), engaged, covered, engaged_count,
                  /*budget_warning=*/false);
}

}  // namespace

CorePartition bgmc(const LabeledGraph& g, int K, double gamma, int tau) {
  if (K < 1) throw ConfigError("coverage budget K must be >= 1");
  if (gamma <= 1.0) throw ConfigError("bucket growth gamma must be > 1");
  std::vector<int> cuts;
  double size = gamma * K;
  while (true) {
    int cut = static_cast<int>(std::min<double>(
        g.num_nodes, std::ceil(size)));
    cuts.push_back(cut);
    if (cut >= g.num_nodes) break;
    size *= gamma;
  }
  return bucketed_greedy(g, K, tau, cuts);
}

CorePartition greedy_mc(const LabeledGraph& g, int K, int tau) {
  if (K < 1) throw ConfigError("coverage budget K must be >= 1");
  return bucketed_greedy(g, K, tau, {g.num_nodes});
}

std::vector<CoverageCurveRow> coverage_curve(const LabeledGraph& g,
                                             const std::vector<double>& exponents,
                                             double gamma, int tau) {
  std::vector<CoverageCurveRow> rows;
  for (double p : exponents) {
    int K = std::max(1, static_cast<int>(std::ceil(std::pow(g.num_nodes, p))));
    CorePartition part = bgmc(g, K, gamma, tau);
    rows.push_back({p, K, part.coverage_fraction, part.core_fraction});
  }
  return rows;
}

}  // namespace nnim
