#pragma once

#include <string>
#include <vector>

#include "nnim/dynamics.hpp"
#include "nnim/types.hpp"

namespace nnim {

/// TSV with one row per user: id column then one probability per label.
void write_score_matrix(const std::string& path, const Matrix& values,
                        const std::vector<std::string>& row_ids);

struct ScoreFile {
  Matrix values;
  std::vector<std::string> row_ids;
};

ScoreFile read_score_matrix(const std::string& path);

/// TSV of (step, displacement, macro_norm) rows.
void write_trajectory(const std::string& path, const Trajectory& traj);

/// FNV-1a 64-bit content hash as hex; used to pin run inputs in reports.
std::string fnv1a64_file(const std::string& path);

struct EgoConvertStats {
  int nodes = 0;
  std::int64_t undirected_friend_edges = 0;
  std::int64_t directed_edges = 0;
  int label_dim = 0;
};

/// Converts a SNAP-style ego network (<id>.edges friend pairs, <id>.feat
/// binary features, <id>.egofeat the ego's own features) into the edge and
/// label formats used here. Friendships between alters become edge pairs in
/// both directions; the ego follows every alter and has no followers.
EgoConvertStats convert_snap_ego(const std::string& edges_path,
                                 const std::string& feat_path,
                                 const std::string& egofeat_path,
                                 const std::string& ego_id,
                                 const std::string& out_prefix);

}  // namespace nnim
