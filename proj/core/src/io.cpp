#include "nnim/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nnim/errors.hpp"

namespace nnim {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_score_matrix(const std::string& path, const Matrix& values,
                        const std::vector<std::string>& row_ids) {
  if (static_cast<Eigen::Index>(row_ids.size()) != values.rows())
    throw ConfigError("row id count must match matrix rows");
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << "# user";
  for (Eigen::Index i = 0; i < values.cols(); ++i) f << "\tl" << i;
  f << '\n';
  for (Eigen::Index u = 0; u < values.rows(); ++u) {
    f << row_ids[u];
    for (Eigen::Index i = 0; i < values.cols(); ++i)
      f << '\t' << format_double(values(u, i));
    f << '\n';
  }
}

ScoreFile read_score_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  ScoreFile out;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string id;
    if (!(is >> id)) continue;
    std::vector<double> vals;
    double v;
    while (is >> v) vals.push_back(v);
    if (vals.empty()) throw ParseError(path, lineno, "row holds no values");
    if (!rows.empty() && vals.size() != rows.back().size())
      throw ParseError(path, lineno, "ragged row");
    out.row_ids.push_back(id);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw DataError("empty score matrix: " + path);
  out.values.resize(rows.size(), rows[0].size());
  for (std::size_t u = 0; u < rows.size(); ++u)
    for (std::size_t i = 0; i < rows[u].size(); ++i)
      out.values(u, i) = rows[u][i];
  return out;
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << "# step\tdisplacement\tmacro_norm\n";
  for (std::size_t s = 0; s < traj.displacement.size(); ++s)
    f << (s + 1) << '\t' << format_double(traj.displacement[s]) << '\t'
      << format_double(traj.macro_norm[s]) << '\n';
  f << "# stopping_step=" << traj.stopping_step
    << " converged=" << (traj.converged ? 1 : 0) << '\n';
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!f) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

EgoConvertStats convert_snap_ego(const std::string& edges_path,
                                 const std::string& feat_path,
                                 const std::string& egofeat_path,
                                 const std::string& ego_id,
                                 const std::string& out_prefix) {
  EgoConvertStats stats;
  auto parent = std::filesystem::path(out_prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);

  std::set<std::pair<std::string, std::string>> pairs;
  {
    std::ifstream f(edges_path);
    if (!f) throw DataError("cannot open " + edges_path);
    std::string a, b;
    while (f >> a >> b) {
      if (a == b) continue;
      pairs.insert({std::min(a, b), std::max(a, b)});
    }
  }
  stats.undirected_friend_edges = static_cast<std::int64_t>(pairs.size());

  // feat rows: "<node> f0 f1 ... f{d-1}"
  std::vector<std::pair<std::string, std::vector<int>>> feats;
  int d = 0;
  {
    std::ifstream f(feat_path);
    if (!f) throw DataError("cannot open " + feat_path);
    std::string line;
    long lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream is(line);
      std::string node;
      is >> node;
      std::vector<int> ones;
      int bit, idx = 0;
      while (is >> bit) {
        if (bit != 0) ones.push_back(idx);
        ++idx;
      }
      if (idx == 0) throw ParseError(feat_path, lineno, "row holds no features");
      if (d == 0) d = idx;
      if (idx != d) throw ParseError(feat_path, lineno, "ragged feature row");
      feats.emplace_back(node, std::move(ones));
    }
  }
  if (feats.empty()) throw DataError("no feature rows in " + feat_path);
  stats.label_dim = d;

  std::vector<int> ego_ones;
  {
    std::ifstream f(egofeat_path);
    if (!f) throw DataError("cannot open " + egofeat_path);
    int bit, idx = 0;
    while (f >> bit) {
      if (bit != 0) ego_ones.push_back(idx);
      ++idx;
    }
    if (idx != d)
      throw DataError(egofeat_path + ": ego feature width disagrees with " +
                      feat_path);
  }

  std::set<std::string> known;
  for (const auto& [node, ones] : feats) known.insert(node);
  {
    std::ofstream f(out_prefix + ".edges");
    if (!f) throw DataError("cannot write " + out_prefix + ".edges");
    f << "# src\tdst (src follows dst)\n";
    for (const auto& [a, b] : pairs) {
      if (!known.count(a) || !known.count(b)) continue;  // featureless endpoint
      f << a << '\t' << b << '\n';
      f << b << '\t' << a << '\n';
      stats.directed_edges += 2;
    }
    for (const auto& [node, ones] : feats) {
      f << ego_id << '\t' << node << '\n';
      ++stats.directed_edges;
    }
  }
  {
    std::ofstream f(out_prefix + ".labels");
    if (!f) throw DataError("cannot write " + out_prefix + ".labels");
    f << "# node\tone-indices (d=" << d << ")\n";
    auto write_row = [&](const std::string& node, const std::vector<int>& ones) {
      f << node << '\t';
      if (ones.empty()) {
        f << '-';
      } else {
        for (std::size_t i = 0; i < ones.size(); ++i)
          f << (i ? "," : "") << ones[i];
      }
      f << '\n';
    };
    for (const auto& [node, ones] : feats) write_row(node, ones);
    write_row(ego_id, ego_ones);
  }
  stats.nodes = static_cast<int>(feats.size()) + 1;
  {
    std::ofstream f(out_prefix + ".json");
    if (!f) throw DataError("cannot write " + out_prefix + ".json");
    f << "{\n  \"nodes\": " << stats.nodes << ",\n  \"edges\": "
      << stats.directed_edges << ",\n  \"label_dim\": " << d
      << ",\n  \"directed\": true\n}\n";
  }
  return stats;
}

}  // namespace nnim
