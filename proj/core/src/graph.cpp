#include "nnim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "nnim/errors.hpp"
#include "nlohmann/json.hpp"

namespace nnim {

namespace {

using json = nlohmann::json;

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  std::string s = pos == std::string::npos ? line : line.substr(0, pos);
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.pop_back();
  return s;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct IdMap {
  std::unordered_map<std::string, int> to_dense;
  std::vector<std::string> original;

  int intern(const std::string& id) {
    auto it = to_dense.find(id);
    if (it != to_dense.end()) return it->second;
    int dense = static_cast<int>(original.size());
    to_dense.emplace(id, dense);
    original.push_back(id);
    return dense;
  }
};

void finalize_adjacency(LabeledGraph& g,
                        std::vector<std::pair<int, int>>& edges) {
  std::sort(edges.begin(), edges.end());
  std::int64_t dupes = 0;
  std::vector<std::pair<int, int>> unique_edges;
  unique_edges.reserve(edges.size());
  for (const auto& e : edges) {
    if (!unique_edges.empty() && unique_edges.back() == e) {
      ++dupes;
      continue;
    }
    unique_edges.push_back(e);
  }
  g.load_report.duplicate_edges_dropped += dupes;
  g.out_adj.assign(g.num_nodes, {});
  g.in_adj.assign(g.num_nodes, {});
  for (const auto& [s, d] : unique_edges) {
    g.out_adj[s].push_back(d);
    g.in_adj[d].push_back(s);
  }
  for (auto& a : g.in_adj) std::sort(a.begin(), a.end());
}

void apply_labels(LabeledGraph& g, int declared_dim,
                  const std::vector<std::pair<int, std::vector<int>>>& rows,
                  const std::string& path) {
  int d = declared_dim;
  if (d == 0) {
    for (const auto& [node, idx] : rows)
      for (int i : idx) d = std::max(d, i + 1);
    if (d == 0) d = 1;
  } else {
    for (const auto& [node, idx] : rows)
      for (int i : idx)
        if (i >= d)
          throw DataError(path + ": label index " + std::to_string(i) +
                          " out of bounds for d=" + std::to_string(d));
  }
  g.label_dim = d;
  g.labels = Matrix::Zero(g.num_nodes, d);
  for (const auto& [node, idx] : rows)
    for (int i : idx) g.labels(node, i) = 1.0;
}

}  // namespace

namespace {

LabeledGraph load_graph_impl(const std::string& edges_path,
                             const std::string& labels_path, bool directed,
                             int label_dim,
                             const std::vector<std::string>* preset_order) {
  LabeledGraph g;
  g.directed = true;  // storage is always directed; undirected input is expanded
  IdMap ids;
  if (preset_order)
    for (const auto& id : *preset_order) ids.intern(id);

  std::ifstream ef(edges_path);
  if (!ef) throw DataError("cannot open edge file: " + edges_path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  long lineno = 0;
  while (std::getline(ef, line)) {
    ++lineno;
    std::string s = strip_comment(line);
    if (s.empty()) continue;
    auto toks = split_ws(s);
    if (toks.size() != 2)
      throw ParseError(edges_path, lineno, "expected 'src<TAB>dst'");
    int a = ids.intern(toks[0]);
    int b = ids.intern(toks[1]);
    ++g.load_report.parsed_edge_rows;
    if (a == b) {
      ++g.load_report.self_loops_dropped;
      continue;
    }
    edges.emplace_back(a, b);
    if (!directed) edges.emplace_back(b, a);
  }

  std::ifstream lf(labels_path);
  if (!lf) throw DataError("cannot open label file: " + labels_path);
  std::vector<std::pair<int, std::vector<int>>> label_rows;
  lineno = 0;
  while (std::getline(lf, line)) {
    ++lineno;
    std::string s = strip_comment(line);
    if (s.empty()) continue;
    auto toks = split_ws(s);
    if (toks.size() != 2)
      throw ParseError(labels_path, lineno,
                       "expected 'node<TAB>i1,i2,...' or 'node<TAB>-'");
    bool known = ids.to_dense.count(toks[0]) > 0;
    int node = ids.intern(toks[0]);
    if (!known) ++g.load_report.isolated_label_nodes;
    std::vector<int> one_idx;
    if (toks[1] != "-") {
      const std::string& list = toks[1];
      std::size_t pos = 0;
      while (pos < list.size()) {
        std::size_t comma = list.find(',', pos);
        std::string item = list.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        int v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size() || v < 0)
          throw ParseError(labels_path, lineno, "bad label index '" + item + "'");
        one_idx.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    label_rows.emplace_back(node, std::move(one_idx));
  }

  g.num_nodes = static_cast<int>(ids.original.size());
  g.original_ids = std::move(ids.original);
  finalize_adjacency(g, edges);
  apply_labels(g, label_dim, label_rows, labels_path);
  return g;
}

}  // namespace

LabeledGraph load_graph(const std::string& edges_path,
                        const std::string& labels_path, bool directed,
                        int label_dim) {
  return load_graph_impl(edges_path, labels_path, directed, label_dim, nullptr);
}

LabeledGraph make_graph(int num_nodes,
                        const std::vector<std::pair<int, int>>& edges_in,
                        int label_dim,
                        const std::vector<std::vector<int>>& one_indices,
                        bool directed) {
  LabeledGraph g;
  g.num_nodes = num_nodes;
  g.original_ids.resize(num_nodes);
  for (int v = 0; v < num_nodes; ++v) g.original_ids[v] = std::to_string(v);
  std::vector<std::pair<int, int>> edges;
  for (auto [a, b] : edges_in) {
    if (a < 0 || a >= num_nodes || b < 0 || b >= num_nodes)
      throw DataError("edge endpoint out of range");
    ++g.load_report.parsed_edge_rows;
    if (a == b) {
      ++g.load_report.self_loops_dropped;
      continue;
    }
    edges.emplace_back(a, b);
    if (!directed) edges.emplace_back(b, a);
  }
  finalize_adjacency(g, edges);
  std::vector<std::pair<int, std::vector<int>>> rows;
  for (int v = 0; v < static_cast<int>(one_indices.size()); ++v)
    rows.emplace_back(v, one_indices[v]);
  apply_labels(g, label_dim, rows, "<memory>");
  return g;
}

void dump_graph(const LabeledGraph& g, const std::string& prefix) {
  {
    std::ofstream ef(prefix + ".edges");
    if (!ef) throw DataError("cannot write " + prefix + ".edges");
    ef << "# src\tdst\n";
    for (int v = 0; v < g.num_nodes; ++v)
      for (int w : g.out_adj[v])
        ef << g.original_ids[v] << '\t' << g.original_ids[w] << '\n';
  }
  {
    std::ofstream lf(prefix + ".labels");
    if (!lf) throw DataError("cannot write " + prefix + ".labels");
    lf << "# node\tone-indices\n";
    for (int v = 0; v < g.num_nodes; ++v) {
      lf << g.original_ids[v] << '\t';
      bool first = true;
      for (int i = 0; i < g.label_dim; ++i) {
        if (g.labels(v, i) == 1.0) {
          if (!first) lf << ',';
          lf << i;
          first = false;
        }
      }
      if (first) lf << '-';
      lf << '\n';
    }
  }
  {
    nlohmann::json hdr;
    hdr["nodes"] = g.num_nodes;
    hdr["edges"] = g.num_edges();
    hdr["label_dim"] = g.label_dim;
    hdr["directed"] = true;
    hdr["node_order"] = g.original_ids;  // keeps dense ids stable on reload
    std::ofstream jf(prefix + ".json");
    if (!jf) throw DataError("cannot write " + prefix + ".json");
    jf << hdr.dump(2) << '\n';
  }
}

LabeledGraph load_dump(const std::string& prefix) {
  std::ifstream jf(prefix + ".json");
  if (!jf) throw DataError("cannot open " + prefix + ".json");
  nlohmann::json hdr = nlohmann::json::parse(jf);
  int d = hdr.at("label_dim").get<int>();
  std::vector<std::string> order;
  if (hdr.contains("node_order"))
    order = hdr.at("node_order").get<std::vector<std::string>>();
  LabeledGraph g =
      load_graph_impl(prefix + ".edges", prefix + ".labels",
                      /*directed=*/true, d, order.empty() ? nullptr : &order);
  if (g.num_nodes != hdr.at("nodes").get<int>() ||
      g.num_edges() != hdr.at("edges").get<std::int64_t>())
    throw DataError("dump header disagrees with dump contents: " + prefix);
  return g;
}

std::vector<int> engaged_nodes(const LabeledGraph& g, int tau) {
  if (tau < 0) throw ConfigError("engagement threshold must be >= 0");
  std::vector<int> out;
  for (int v = 0; v < g.num_nodes; ++v)
    if (g.out_degree(v) >= tau) out.push_back(v);
  return out;
}

}  // namespace nnim
