#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnim/core_extract.hpp"
#include "nnim/graph.hpp"
#include "nnim/metrics.hpp"
#include "nnim/types.hpp"

namespace nnim {

/// One experiment end to end. Defaults: p=0.7, gamma=2, D=1e-3, tau=4,
/// 10 trees, seed=17.
struct RunConfig {
  std::string edges_path;
  std::string labels_path;
  std::string name = "dataset";
  bool directed = true;
  int label_dim = 0;  // 0 = infer from the label file

  double p = 0.7;
  int K = 0;  // 0 = derive from p
  double gamma = 2.0;
  int tau = 4;

  // nnim-log | nnim-sqrt | nnim-reg-log | cf-bipartite | cf-dynamic |
  // label-prop | random-hk
  std::string method = "nnim-log";
  std::string k_text;  // overrides the method's k policy when set
  double D = 1e-3;
  double alpha = 0.0;  // nnim-reg-log defaults it to 1 when left at 0
  bool pca = true;
  double pca_variance = 0.95;
  std::string index_mode = "lsh";
  int trees = 10;
  int leaf_capacity = 64;
  double hk_radius = 0.0;  // 0 = sqrt(d/2)

  double epsilon = 1e-3;  // simulator stopping threshold
  std::uint64_t seed = 17;
  int max_steps = 100;
  int threads = 0;  // 0 = hardware default

  std::string out_dir;  // required for run_pipeline
};

struct PartitionStats {
  std::int64_t nodes = 0;
  std::int64_t edges = 0;
  std::int64_t engaged = 0;
  std::int64_t core_size = 0;
  std::int64_t periphery_size = 0;
  std::int64_t uncovered_engaged = 0;
  double coverage_engaged_pct = 0.0;  // covered engaged / engaged
  double coverage_network_pct = 0.0;  // covered engaged / nodes
  double core_pct = 0.0;
  double bipartite_edge_pct = 0.0;
};

struct TrajectorySummary {
  int steps = 0;
  double final_displacement = 0.0;
  bool converged = true;
  int k = 0;
};

struct RunReport {
  std::string dataset;
  std::string method;
  PartitionStats partition;
  EvalReport eval;
  TrajectorySummary trajectory;
  std::map<std::string, std::string> input_hashes;

  /// Deterministic JSON: config echo, partition, metrics, trajectory. No
  /// timing, no output paths.
  std::string to_json(const RunConfig& config) const;
};

PartitionStats partition_stats(const LabeledGraph& g, const CorePartition& p);

/// load -> extract core -> method -> evaluate -> write artifacts. Artifacts:
/// config.json, core.txt, bipartite.tsv, partition.json, truth.tsv,
/// scores.tsv, trajectory.tsv, report.json and timing.json under out_dir.
/// Identical config and seed give byte-identical scores and report.
RunReport run_pipeline(const RunConfig& config);

/// Aggregates report.json files from run directories into a
/// methods x datasets grid per metric, as TSV and Markdown.
void export_tables(const std::vector<std::string>& run_dirs,
                   std::string* tsv_out, std::string* markdown_out);

/// Evaluation of a score file against a truth file (used by the evaluate
/// subcommand; also accepts externally produced score matrices).
EvalReport evaluate_files(const std::string& truth_path,
                          const std::string& scores_path, bool binary);

/// Resolved coverage budget: explicit K or ceil(N^p).
int resolve_budget(const RunConfig& config, int num_nodes);

}  // namespace nnim
