#include "nnim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "nlohmann/json.hpp"
#include "nnim/baselines.hpp"
#include "nnim/errors.hpp"
#include "nnim/inference.hpp"
#include "nnim/io.hpp"
#include "nnim/parallel.hpp"

namespace nnim {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

json config_echo(const RunConfig& c) {
  json j;
  j["dataset"] = c.name;
  j["edges_path"] = c.edges_path;
  j["labels_path"] = c.labels_path;
  j["directed"] = c.directed;
  j["label_dim"] = c.label_dim;
  j["p"] = c.p;
  j["K"] = c.K;
  j["gamma"] = c.gamma;
  j["tau"] = c.tau;
  j["method"] = c.method;
  j["k"] = c.k_text;
  j["D"] = c.D;
  j["alpha"] = c.alpha;
  j["pca"] = c.pca;
  j["pca_variance"] = c.pca_variance;
  j["index"] = c.index_mode;
  j["trees"] = c.trees;
  j["leaf_capacity"] = c.leaf_capacity;
  j["hk_radius"] = c.hk_radius;
  j["epsilon"] = c.epsilon;
  j["seed"] = c.seed;
  j["max_steps"] = c.max_steps;
  return j;
}

json partition_json(const PartitionStats& s) {
  json j;
  j["nodes"] = s.nodes;
  j["edges"] = s.edges;
  j["engaged"] = s.engaged;
  j["core_size"] = s.core_size;
  j["periphery_size"] = s.periphery_size;
  j["uncovered_engaged"] = s.uncovered_engaged;
  j["coverage_engaged_pct"] = s.coverage_engaged_pct;
  j["coverage_network_pct"] = s.coverage_network_pct;
  j["core_pct"] = s.core_pct;
  j["bipartite_edge_pct"] = s.bipartite_edge_pct;
  return j;
}

json eval_json(const EvalReport& e) {
  json j;
  j["auc_all"] = e.auc_all;
  j["auc_top50"] = e.auc_top50;
  j["rmse_macro"] = e.rmse_macro;
  if (e.f1_micro) j["f1_micro"] = *e.f1_micro;
  j["coverage_pct"] = e.coverage_pct;
  j["core_pct"] = e.core_pct;
  j["bipartite_edge_pct"] = e.bipartite_edge_pct;
  return j;
}

struct MethodOutput {
  ScoreMatrix scores;
  TrajectorySummary trajectory;
  std::optional<Trajectory> full_trajectory;
};

MethodOutput run_method(const RunConfig& config, const LabeledGraph& g,
                        const CorePartition& part) {
  MethodOutput out;
  const int n = static_cast<int>(part.periphery.size());

  auto k_policy = [&](KPolicy fallback) {
    return config.k_text.empty() ? fallback : KPolicy::parse(config.k_text);
  };

  if (config.method == "nnim-log" || config.method == "nnim-sqrt" ||
      config.method == "nnim-reg-log") {
    InferenceConfig icfg;
    icfg.k_policy = k_policy(config.method == "nnim-sqrt" ? KPolicy::sqrt()
                                                          : KPolicy::log());
    icfg.D = config.D;
    icfg.max_steps = config.max_steps;
    icfg.alpha = config.method == "nnim-reg-log" && config.alpha == 0.0
                     ? 1.0
                     : config.alpha;
    icfg.pca = config.pca;
    icfg.pca_variance = config.pca_variance;
    if (config.index_mode == "exact")
      icfg.index_mode = IndexMode::kExact;
    else if (config.index_mode == "lsh")
      icfg.index_mode = IndexMode::kLsh;
    else
      throw ConfigError("index mode must be 'exact' or 'lsh'");
    icfg.trees = config.trees;
    icfg.leaf_capacity = config.leaf_capacity;
    icfg.seed = config.seed;

    InferenceResult res = run_inference(part, g, icfg);
    out.scores = {std::move(res.beliefs.phi), config.method};
    out.trajectory.steps = res.trajectory.stopping_step;
    out.trajectory.final_displacement = res.trajectory.displacement.empty()
                                            ? 0.0
                                            : res.trajectory.displacement.back();
    out.trajectory.converged = res.trajectory.converged;
    out.trajectory.k = res.k;
    out.full_trajectory = std::move(res.trajectory);
  } else if (config.method == "cf-bipartite") {
    out.scores = cf_bipartite(part, g);
  } else if (config.method == "cf-dynamic") {
    out.scores = cf_dynamic(g, part, config.max_steps, config.D);
  } else if (config.method == "label-prop") {
    out.scores = label_propagation(g, part, config.seed, config.max_steps);
  } else if (config.method == "random-hk") {
    RandomHkConfig hk;
    hk.k = k_policy(KPolicy::log()).resolve(n);
    hk.epsilon_radius = config.hk_radius > 0.0
                            ? config.hk_radius
                            : std::sqrt(g.label_dim / 2.0);
    hk.D = config.D;
    hk.max_steps = config.max_steps;
    hk.seed = config.seed;
    out.scores = random_hk(part, g, hk);
    out.trajectory.k = hk.k;
  } else {
    throw ConfigError("unknown method: " + config.method);
  }
  return out;
}

/// Reruns a stage and prefixes any failure with the stage name, keeping the
/// error category so exit codes survive.
template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw DataError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

int resolve_budget(const RunConfig& config, int num_nodes) {
  if (config.K > 0) return config.K;
  return std::max(
      1, static_cast<int>(std::ceil(std::pow(num_nodes, config.p))));
}

PartitionStats partition_stats(const LabeledGraph& g, const CorePartition& p) {
  PartitionStats s;
  s.nodes = g.num_nodes;
  s.edges = g.num_edges();
  s.engaged = p.engaged_count;
  s.core_size = static_cast<std::int64_t>(p.core.size());
  s.periphery_size = static_cast<std::int64_t>(p.periphery.size());
  s.uncovered_engaged = static_cast<std::int64_t>(p.uncovered_engaged.size());
  s.coverage_engaged_pct = 100.0 * p.coverage_fraction;
  s.coverage_network_pct =
      g.num_nodes == 0
          ? 0.0
          : 100.0 * static_cast<double>(p.covered_engaged_count) / g.num_nodes;
  s.core_pct = 100.0 * p.core_fraction;
  s.bipartite_edge_pct = 100.0 * p.bipartite_edge_fraction;
  return s;
}

std::string RunReport::to_json(const RunConfig& config) const {
  json j;
  j["dataset"] = dataset;
  j["method"] = method;
  j["config"] = config_echo(config);
  j["partition"] = partition_json(partition);
  j["eval"] = eval_json(eval);
  j["trajectory"]["steps"] = trajectory.steps;
  j["trajectory"]["final_displacement"] = trajectory.final_displacement;
  j["trajectory"]["converged"] = trajectory.converged;
  j["trajectory"]["k"] = trajectory.k;
  j["input_hashes"] = input_hashes;
  return j.dump(2) + "\n";
}

RunReport run_pipeline(const RunConfig& config) {
  if (config.out_dir.empty()) throw ConfigError("out_dir is required");
  if (config.threads > 0) set_max_threads(config.threads);
  fs::create_directories(config.out_dir);
  auto path = [&](const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
  };

  json timing;
  auto t_total = std::chrono::steady_clock::now();

  auto t0 = std::chrono::steady_clock::now();
  LabeledGraph g = stage("load", [&] {
    return load_graph(config.edges_path, config.labels_path, config.directed,
                      config.label_dim);
  });
  timing["load_s"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  CorePartition part = stage("extract-core", [&] {
    CorePartition p =
        bgmc(g, resolve_budget(config, g.num_nodes), config.gamma, config.tau);
    if (p.periphery.empty())
      throw DataError("extraction produced an empty periphery");
    return p;
  });
  timing["core_extract_s"] = seconds_since(t0);

  RunReport report;
  report.dataset = config.name;
  report.method = config.method;
  report.partition = partition_stats(g, part);
  report.input_hashes["edges"] = fnv1a64_file(config.edges_path);
  report.input_hashes["labels"] = fnv1a64_file(config.labels_path);

  // Partition artifacts.
  {
    std::ofstream f(path("core.txt"));
    for (int c : part.core) f << g.original_ids[c] << '\n';
  }
  {
    std::ofstream f(path("bipartite.tsv"));
    f << "# periphery\tcore\n";
    for (std::size_t r = 0; r < part.periphery.size(); ++r)
      for (int c : part.followed_core[r])
        f << g.original_ids[part.periphery[r]] << '\t' << g.original_ids[c]
          << '\n';
  }
  {
    std::ofstream f(path("partition.json"));
    f << partition_json(report.partition).dump(2) << '\n';
  }

  // Ground truth for the periphery.
  Matrix truth(part.periphery.size(), g.label_dim);
  std::vector<std::string> row_ids(part.periphery.size());
  for (std::size_t r = 0; r < part.periphery.size(); ++r) {
    truth.row(r) = g.labels.row(part.periphery[r]);
    row_ids[r] = g.original_ids[part.periphery[r]];
  }
  write_score_matrix(path("truth.tsv"), truth, row_ids);

  t0 = std::chrono::steady_clock::now();
  MethodOutput method_out =
      stage("method", [&] { return run_method(config, g, part); });
  timing["method_s"] = seconds_since(t0);
  report.trajectory = method_out.trajectory;
  write_score_matrix(path("scores.tsv"), method_out.scores.scores, row_ids);
  if (method_out.full_trajectory)
    write_trajectory(path("trajectory.tsv"), *method_out.full_trajectory);

  t0 = std::chrono::steady_clock::now();
  stage("evaluate", [&] {
    report.eval.auc_all = auc_micro(truth, method_out.scores.scores);
    auto top = top50_label_set(truth);
    report.eval.auc_top50 = auc_micro(truth, method_out.scores.scores, &top);
    report.eval.rmse_macro = rmse_macro(truth, method_out.scores.scores);
    if (config.method == "label-prop")
      report.eval.f1_micro = f1_micro(truth, method_out.scores.scores);
    return 0;
  });
  report.eval.coverage_pct = report.partition.coverage_network_pct;
  report.eval.core_pct = report.partition.core_pct;
  report.eval.bipartite_edge_pct = report.partition.bipartite_edge_pct;
  timing["evaluate_s"] = seconds_since(t0);

  {
    std::ofstream f(path("config.json"));
    f << config_echo(config).dump(2) << '\n';
  }
  {
    std::ofstream f(path("report.json"));
    f << report.to_json(config);
  }
  timing["total_s"] = seconds_since(t_total);
  report.eval.runtime_s = timing["total_s"].get<double>();
  {
    std::ofstream f(path("timing.json"));
    f << timing.dump(2) << '\n';
  }
  return report;
}

EvalReport evaluate_files(const std::string& truth_path,
                          const std::string& scores_path, bool binary) {
  ScoreFile truth = read_score_matrix(truth_path);
  ScoreFile scores = read_score_matrix(scores_path);
  if (truth.row_ids != scores.row_ids)
    throw DataError("truth and scores row ids disagree");
  EvalReport e;
  e.auc_all = auc_micro(truth.values, scores.values);
  auto top = top50_label_set(truth.values);
  e.auc_top50 = auc_micro(truth.values, scores.values, &top);
  e.rmse_macro = rmse_macro(truth.values, scores.values);
  if (binary) e.f1_micro = f1_micro(truth.values, scores.values);
  return e;
}

void export_tables(const std::vector<std::string>& run_dirs,
                   std::string* tsv_out, std::string* markdown_out) {
  std::map<std::string, std::map<std::string, json>> by_method;  // method -> dataset
  std::vector<std::string> datasets;

  for (const auto& dir : run_dirs) {
    std::ifstream f((fs::path(dir) / "report.json").string());
    if (!f) throw DataError("missing report.json under " + dir);
    json r = json::parse(f);
    std::string dataset = r.at("dataset").get<std::string>();
    std::string method = r.at("method").get<std::string>();
    by_method[method][dataset] = r;
    if (std::find(datasets.begin(), datasets.end(), dataset) == datasets.end())
      datasets.push_back(dataset);
  }

  const std::vector<std::pair<std::string, std::string>> metrics = {
      {"auc_all", "AUC-ROC (all labels)"},
      {"auc_top50", "AUC-ROC (top 50% of labels)"},
      {"f1_micro", "F1 (binary predictors)"},
      {"rmse_macro", "RMSE"},
      {"coverage_pct", "Coverage (%)"},
      {"core_pct", "Core size (%)"},
      {"bipartite_edge_pct", "Bipartite edge fraction (%)"},
  };

  std::string tsv, md;
  for (const auto& [key, title] : metrics) {
    tsv += "# " + title + "\nmethod";
    md += "\n**" + title + "**\n\n| method |";
    for (const auto& d : datasets) {
      tsv += "\t" + d;
      md += " " + d + " |";
    }
    tsv += "\n";
    md += "\n|---|";
    for (std::size_t i = 0; i < datasets.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& [method, cells] : by_method) {
      tsv += method;
      md += "| " + method + " |";
      for (const auto& d : datasets) {
        std::string text = "—";
        auto it = cells.find(d);
        if (it != cells.end()) {
          const json& ev = it->second.at("eval");
          if (ev.contains(key)) {
            double v = ev.at(key).get<double>();
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4g", v);
            text = buf;
          }
        }
        tsv += "\t" + text;
        md += " " + text + " |";
      }
      tsv += "\n";
      md += "\n";
    }
    tsv += "\n";
  }
  if (tsv_out) *tsv_out = tsv;
  if (markdown_out) *markdown_out = md;
}

}  // namespace nnim
