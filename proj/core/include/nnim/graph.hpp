#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nnim/types.hpp"

namespace nnim {

struct LoadReport {
  std::int64_t parsed_edge_rows = 0;
  std::int64_t self_loops_dropped = 0;
  std::int64_t duplicate_edges_dropped = 0;
  std::int64_t isolated_label_nodes = 0;
};

/// Directed graph over dense node ids 0..N-1 with a binary label matrix.
/// Immutable once loaded; safe for concurrent reads.
struct LabeledGraph {
  int num_nodes = 0;
  int label_dim = 1;
  bool directed = true;
  std::vector<std::vector<int>> out_adj;  // sorted, unique, no self-loops
  std::vector<std::vector<int>> in_adj;
  Matrix labels;                          // N x d, entries exactly 0 or 1
  std::vector<std::string> original_ids;  // dense id -> input id
  LoadReport load_report;

  int out_degree(int v) const { return static_cast<int>(out_adj[v].size()); }
  int in_degree(int v) const { return static_cast<int>(in_adj[v].size()); }

  /// Number of stored directed edges.
  std::int64_t num_edges() const {
    std::int64_t e = 0;
    for (const auto& a : out_adj) e += static_cast<std::int64_t>(a.size());
    return e;
  }
};

/// Reads "src<TAB>dst" edge rows and "node<TAB>i1,i2,..." label rows
/// ('-' marks an all-zero row, '#' starts a comment). Node ids are remapped
/// to dense integers in order of first appearance; label-only nodes are kept
/// as isolated nodes. directed=false symmetrizes each input edge.
/// label_dim=0 infers d as (max label index + 1).
LabeledGraph load_graph(const std::string& edges_path,
                        const std::string& labels_path, bool directed,
                        int label_dim = 0);

/// Writes <prefix>.edges, <prefix>.labels and <prefix>.json (N, |E|, d,
/// directed). Reloading the dump reproduces the graph exactly.
void dump_graph(const LabeledGraph& g, const std::string& prefix);

/// Loads a canonical dump written by dump_graph.
LabeledGraph load_dump(const std::string& prefix);

/// Nodes with out-degree >= tau: the coverage universe and the periphery
/// candidate pool. Sorted ascending.
std::vector<int> engaged_nodes(const LabeledGraph& g, int tau);

/// Builds a graph in memory from (src, dst) pairs and explicit labels.
/// Same cleanup rules as load_graph. label rows may be empty (all-zero).
LabeledGraph make_graph(int num_nodes,
                        const std::vector<std::pair<int, int>>& edges,
                        int label_dim,
                        const std::vector<std::vector<int>>& one_indices,
                        bool directed = true);

}  // namespace nnim
