#pragma once

#include <cstdint>
#include <vector>

#include "nnim/graph.hpp"

namespace nnim {

/// Core/periphery split produced by greedy maximum coverage. A picked node
/// covers itself and its followers (in-neighbors); the periphery holds the
/// covered engaged nodes that are not core members.
struct CorePartition {
  std::vector<int> core;                        // in pick order
  std::vector<int> periphery;                   // sorted ascending; row order
  std::vector<std::vector<int>> followed_core;  // per periphery row: core ids
  std::vector<int> uncovered_engaged;           // engaged but never covered

  std::int64_t engaged_count = 0;
  std::int64_t covered_engaged_count = 0;
  std::int64_t bipartite_edges = 0;
  double coverage_fraction = 0.0;       // covered engaged / engaged
  double core_fraction = 0.0;           // |C| / N
  double bipartite_edge_fraction = 0.0; // bipartite edges / |E|
  bool budget_warning = false;          // K >= N degenerate request
};

/// Bucketed greedy maximum coverage: nodes sorted by in-degree descending,
/// candidate buckets with cumulative sizes ceil(gamma^r * K); greedy picks
/// within the current bucket until the budget K is spent or every engaged
/// node is covered. Ties broken by higher in-degree, then lower id.
CorePartition bgmc(const LabeledGraph& g, int K, double gamma, int tau);

/// Plain greedy maximum coverage over all nodes; the reference policy.
CorePartition greedy_mc(const LabeledGraph& g, int K, int tau);

struct CoverageCurveRow {
  double p = 0.0;
  int K = 0;
  double coverage_fraction = 0.0;
  double core_fraction = 0.0;
};

/// Runs bgmc with K = ceil(N^p) for each exponent p.
std::vector<CoverageCurveRow> coverage_curve(const LabeledGraph& g,
                                             const std::vector<double>& exponents,
                                             double gamma, int tau);

}  // namespace nnim
