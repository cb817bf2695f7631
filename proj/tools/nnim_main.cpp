// Command line front end: extract-core | simulate | infer | baseline |
// evaluate | hi | check | pipeline | export-tables | convert-ego.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 non-convergence
// under --strict.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "nnim/baselines.hpp"
#include "nnim/core_extract.hpp"
#include "nnim/dynamics.hpp"
#include "nnim/errors.hpp"
#include "nnim/inference.hpp"
#include "nnim/io.hpp"
#include "nnim/metrics.hpp"
#include "nnim/parallel.hpp"
#include "nnim/pipeline.hpp"
#include "nnim/theory.hpp"

namespace fs = std::filesystem;
using nnim::RunConfig;
using json = nlohmann::json;

namespace {

struct CommonArgs {
  RunConfig config;
  bool strict = false;
};

void add_dataset_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--edges", c.edges_path, "edge list file (src<TAB>dst)")
      ->required();
  cmd->add_option("--labels", c.labels_path, "label file (node<TAB>i1,i2,...)")
      ->required();
  cmd->add_option("--name", c.name, "dataset name used in reports");
  cmd->add_flag("--undirected", [&c](std::int64_t) { c.directed = false; },
                "symmetrize input edges");
  cmd->add_option("--label-dim", c.label_dim, "label dimension (0 = infer)");
}

void add_partition_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--p", c.p, "core budget exponent: K = ceil(N^p)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--K", c.K, "explicit core budget (overrides --p)");
  cmd->add_option("--gamma", c.gamma, "bucket growth factor")
      ->check(CLI::Range(1.000001, 1e9));
  cmd->add_option("--tau", c.tau, "engagement out-degree threshold")
      ->check(CLI::NonNegativeNumber);
}

void add_inference_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--k", c.k_text, "neighbor count: log, sqrt, or an integer");
  cmd->add_option("--D", c.D, "stopping displacement threshold");
  cmd->add_option("--alpha", c.alpha, "regularization weight");
  cmd->add_option("--pca-variance", c.pca_variance,
                  "explained variance kept by PCA");
  cmd->add_flag("--no-pca", [&c](std::int64_t) { c.pca = false; },
                "skip the PCA reduction");
  cmd->add_option("--index", c.index_mode, "neighbor index: exact or lsh")
      ->check(CLI::IsMember({"exact", "lsh"}));
  cmd->add_option("--trees", c.trees, "lsh forest size");
  cmd->add_option("--leaf-capacity", c.leaf_capacity, "lsh leaf capacity");
  cmd->add_option("--max-steps", c.max_steps, "iteration cap");
  cmd->add_option("--seed", c.seed, "random seed");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const nnim::ConfigError*>(&e)) return 2;
  if (dynamic_cast<const nnim::DataError*>(&e)) return 3;
  return 1;
}

nnim::CorePartition extract(const RunConfig& c, nnim::LabeledGraph& g) {
  g = nnim::load_graph(c.edges_path, c.labels_path, c.directed, c.label_dim);
  return nnim::bgmc(g, nnim::resolve_budget(c, g.num_nodes), c.gamma, c.tau);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw nnim::DataError("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-periphery interest prediction with nearest-neighbor "
               "opinion dynamics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override");

  RunConfig c;
  bool strict = false;
  int threads = 0;
  app.add_option("--threads", threads, "global worker cap (0 = hardware)");
  app.add_flag("--strict", strict, "exit 4 when the dynamics fail to converge");

  std::string out_dir = "runs/out";

  // ---- extract-core ----
  auto* cmd_extract = app.add_subcommand(
      "extract-core", "influencer core via bucketed greedy max coverage");
  add_dataset_flags(cmd_extract, c);
  add_partition_flags(cmd_extract, c);
  std::vector<double> curve_exponents;
  cmd_extract->add_option("--curve", curve_exponents,
                          "also sweep budget exponents p and emit "
                          "coverage_curve.tsv");
  cmd_extract->add_option("--out", out_dir, "output directory");

  // ---- simulate ----
  auto* cmd_sim = app.add_subcommand(
      "simulate", "stochastic opinion dynamics from the core initialization");
  add_dataset_flags(cmd_sim, c);
  add_partition_flags(cmd_sim, c);
  add_inference_flags(cmd_sim, c);
  double epsilon = 1e-3;
  int snapshot_every = 0;
  cmd_sim->add_option("--epsilon", epsilon, "stopping threshold");
  cmd_sim->add_option("--snapshot-every", snapshot_every,
                      "dump parameters every s steps");
  cmd_sim->add_option("--out", out_dir, "output directory");

  // ---- infer ----
  auto* cmd_infer =
      app.add_subcommand("infer", "mean-field k-NN belief propagation");
  add_dataset_flags(cmd_infer, c);
  add_partition_flags(cmd_infer, c);
  add_inference_flags(cmd_infer, c);
  cmd_infer->add_option("--out", out_dir, "output directory");

  // ---- baseline ----
  auto* cmd_base = app.add_subcommand("baseline", "comparison predictors");
  add_dataset_flags(cmd_base, c);
  add_partition_flags(cmd_base, c);
  add_inference_flags(cmd_base, c);
  std::string method = "cf-bipartite";
  double hk_radius = 0.0;
  cmd_base->add_option("--method", method, "predictor")
      ->check(CLI::IsMember(
          {"cf-bipartite", "cf-dynamic", "label-prop", "random-hk"}))
      ->required();
  cmd_base->add_option("--hk-radius", hk_radius,
                       "random-hk ball radius (0 = sqrt(d/2))");
  cmd_base->add_option("--out", out_dir, "output directory");

  // ---- evaluate ----
  auto* cmd_eval = app.add_subcommand(
      "evaluate", "score a prediction matrix against ground truth");
  std::string truth_path, scores_path;
  bool binary = false;
  cmd_eval->add_option("--truth", truth_path, "truth matrix TSV")->required();
  cmd_eval->add_option("--scores", scores_path, "score matrix TSV")->required();
  cmd_eval->add_flag("--binary", binary, "also report micro F1");
  std::string eval_out;
  cmd_eval->add_option("--out", eval_out, "write the report JSON here too");

  // ---- hi ----
  auto* cmd_hi =
      app.add_subcommand("hi", "homophilic index of a labeled graph");
  add_dataset_flags(cmd_hi, c);
  std::string hi_k = "outdeg";
  cmd_hi->add_option("--k", hi_k, "outdeg | log | an integer");

  // ---- check ----
  auto* cmd_check = app.add_subcommand(
      "check", "empirical validation suites for the dynamics theory");
  std::string suite = "all";
  int check_n = 16, check_k = 2, check_trials = 200;
  std::uint64_t check_seed = 17;
  double check_D = 1e-3, check_C = 10.0;
  cmd_check->add_option("--suite", suite, "convergence|bound|ordering|overlap|all")
      ->check(CLI::IsMember({"convergence", "bound", "ordering", "overlap", "all"}));
  cmd_check->add_option("--n", check_n, "agents per instance");
  cmd_check->add_option("--k", check_k, "neighbors per agent");
  cmd_check->add_option("--trials", check_trials, "instances");
  cmd_check->add_option("--seed", check_seed, "random seed");
  cmd_check->add_option("--D", check_D, "displacement threshold (bound suite)");
  cmd_check->add_option("--C", check_C, "iteration budget constant");
  int check_cap = 120;
  cmd_check->add_option("--cap", check_cap, "step cap for the exact runs");
  std::string check_out;
  cmd_check->add_option("--out", check_out, "output directory");

  // ---- pipeline ----
  auto* cmd_pipe = app.add_subcommand(
      "pipeline", "load -> extract -> predict -> evaluate -> report");
  add_dataset_flags(cmd_pipe, c);
  add_partition_flags(cmd_pipe, c);
  add_inference_flags(cmd_pipe, c);
  cmd_pipe->add_option("--method", c.method,
                       "nnim-log | nnim-sqrt | nnim-reg-log | cf-bipartite | "
                       "cf-dynamic | label-prop | random-hk");
  cmd_pipe->add_option("--hk-radius", c.hk_radius,
                       "random-hk ball radius (0 = sqrt(d/2))");
  cmd_pipe->add_option("--out", out_dir, "run directory");

  // ---- export-tables ----
  auto* cmd_tables = app.add_subcommand(
      "export-tables", "aggregate run reports into a results grid");
  std::vector<std::string> run_dirs;
  cmd_tables->add_option("dirs", run_dirs, "run directories")->required();
  std::string tables_prefix = "results";
  cmd_tables->add_option("--out-prefix", tables_prefix,
                         "write <prefix>.tsv and <prefix>.md");

  // ---- convert-ego ----
  auto* cmd_ego = app.add_subcommand(
      "convert-ego", "convert a SNAP ego network into edge/label files");
  std::string ego_edges, ego_feat, ego_egofeat, ego_id = "ego",
              ego_out = "ego_converted";
  cmd_ego->add_option("--edges", ego_edges, "<id>.edges file")->required();
  cmd_ego->add_option("--feat", ego_feat, "<id>.feat file")->required();
  cmd_ego->add_option("--egofeat", ego_egofeat, "<id>.egofeat file")->required();
  cmd_ego->add_option("--ego-id", ego_id, "identifier for the ego node");
  cmd_ego->add_option("--out-prefix", ego_out, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // flag/config problems map to exit 2
  }

  try {
    if (threads > 0) nnim::set_max_threads(threads);

    if (*cmd_extract) {
      nnim::LabeledGraph g;
      nnim::CorePartition part = extract(c, g);
      fs::create_directories(out_dir);
      std::ofstream core((fs::path(out_dir) / "core.txt").string());
      for (int v : part.core) core << g.original_ids[v] << '\n';
      std::ofstream bip((fs::path(out_dir) / "bipartite.tsv").string());
      bip << "# periphery\tcore\n";
      for (std::size_t r = 0; r < part.periphery.size(); ++r)
        for (int cc : part.followed_core[r])
          bip << g.original_ids[part.periphery[r]] << '\t'
              << g.original_ids[cc] << '\n';
      auto stats = nnim::partition_stats(g, part);
      json j = json::parse(R"({})");
      j["nodes"] = stats.nodes;
      j["engaged"] = stats.engaged;
      j["core_size"] = stats.core_size;
      j["periphery_size"] = stats.periphery_size;
      j["coverage_engaged_pct"] = stats.coverage_engaged_pct;
      j["coverage_network_pct"] = stats.coverage_network_pct;
      j["core_pct"] = stats.core_pct;
      j["bipartite_edge_pct"] = stats.bipartite_edge_pct;
      write_text((fs::path(out_dir) / "partition.json").string(),
                 j.dump(2) + "\n");
      if (!curve_exponents.empty()) {
        auto rows = nnim::coverage_curve(g, curve_exponents, c.gamma, c.tau);
        std::string tsv = "p\tK\tcoverage_fraction\tcore_fraction\n";
        for (const auto& row : rows)
          tsv += std::to_string(row.p) + "\t" + std::to_string(row.K) + "\t" +
                 std::to_string(row.coverage_fraction) + "\t" +
                 std::to_string(row.core_fraction) + "\n";
        write_text((fs::path(out_dir) / "coverage_curve.tsv").string(), tsv);
      }
      std::cout << j.dump(2) << std::endl;
      return 0;
    }

    if (*cmd_sim) {
      nnim::LabeledGraph g;
      nnim::CorePartition part = extract(c, g);
      nnim::Matrix xi0 = nnim::cf_bipartite(part, g).scores;
      int n = static_cast<int>(xi0.rows());
      int k = (c.k_text.empty() ? nnim::KPolicy::log()
                                : nnim::KPolicy::parse(c.k_text))
                  .resolve(n);
      fs::create_directories(out_dir);
      nnim::NnimOptions opts;
      opts.use_lsh = c.index_mode == "lsh";
      opts.lsh = {c.trees, c.leaf_capacity, c.seed};
      opts.snapshot_every = snapshot_every;
      std::vector<std::string> row_ids;
      for (int v : part.periphery) row_ids.push_back(g.original_ids[v]);
      if (snapshot_every > 0)
        opts.snapshot = [&](const nnim::OpinionState& s) {
          nnim::write_score_matrix(
              (fs::path(out_dir) / ("xi_t" + std::to_string(s.t) + ".tsv"))
                  .string(),
              s.xi, row_ids);
        };
      auto [state, traj] = nnim::run_nnim(xi0, k, epsilon, c.max_steps,
                                          c.seed, opts);
      nnim::write_score_matrix((fs::path(out_dir) / "xi_final.tsv").string(),
                               state.xi, row_ids);
      nnim::write_trajectory((fs::path(out_dir) / "trajectory.tsv").string(),
                             traj);
      std::cout << "stopping_step=" << traj.stopping_step
                << " converged=" << traj.converged << std::endl;
      if (strict && !traj.converged) return 4;
      return 0;
    }

    if (*cmd_infer || *cmd_base || *cmd_pipe) {
      if (*cmd_infer) c.method = c.k_text == "sqrt" ? "nnim-sqrt" : "nnim-log";
      if (*cmd_base) {
        c.method = method;
        c.hk_radius = hk_radius;
      }
      if (out_dir == "runs/out") {
        // default: a timestamped run directory
        std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S",
                      std::localtime(&now));
        out_dir = "runs/" + c.name + "-" + c.method + "-" + stamp;
      }
      c.out_dir = out_dir;
      nnim::RunReport report = nnim::run_pipeline(c);
      std::cout << report.to_json(c) << std::endl;
      if (strict && !report.trajectory.converged) return 4;
      return 0;
    }

    if (*cmd_eval) {
      nnim::EvalReport e = nnim::evaluate_files(truth_path, scores_path, binary);
      json j;
      j["auc_all"] = e.auc_all;
      j["auc_top50"] = e.auc_top50;
      j["rmse_macro"] = e.rmse_macro;
      if (e.f1_micro) j["f1_micro"] = *e.f1_micro;
      std::cout << j.dump(2) << std::endl;
      std::cout << "tsv\t" << e.auc_all << '\t' << e.auc_top50 << '\t'
                << e.rmse_macro;
      if (e.f1_micro) std::cout << '\t' << *e.f1_micro;
      std::cout << std::endl;
      if (!eval_out.empty()) write_text(eval_out, j.dump(2) + "\n");
      return 0;
    }

    if (*cmd_hi) {
      nnim::LabeledGraph g = nnim::load_graph(c.edges_path, c.labels_path,
                                              c.directed, c.label_dim);
      nnim::HiPolicy policy = nnim::HiPolicy::out_degree_plus_one();
      if (hi_k == "log")
        policy = nnim::HiPolicy::ceil_log();
      else if (hi_k != "outdeg")
        policy = nnim::HiPolicy::literal_k(std::stoi(hi_k));
      double hi = nnim::homophilic_index(g, policy);
      json j;
      j["homophilic_index"] = hi;
      j["k_policy"] = hi_k;
      std::cout << j.dump(2) << std::endl;
      return 0;
    }

    if (*cmd_check) {
      json out;
      if (suite == "convergence" || suite == "all") {
        auto r = nnim::check_finite_convergence(check_n, check_k, check_trials,
                                                check_seed, check_cap);
        out["convergence"] = {{"trials", r.trials},
                              {"converged", r.converged_trials},
                              {"max_steps", r.max_steps_observed},
                              {"sigma_ok", r.sigma_condition_ok},
                              {"counterexample", r.counterexample}};
      }
      if (suite == "bound" || suite == "all") {
        auto r = nnim::check_iteration_bound(check_n, check_k, check_D,
                                             check_trials, check_seed, check_C);
        out["bound"] = {{"median_steps", r.median_steps},
                        {"budget", r.bound},
                        {"within_budget", r.within_bound},
                        {"fitted_decay", r.fitted_decay},
                        {"reference_decay", r.reference_decay},
                        {"cap_hits", r.cap_hits}};
      }
      if (suite == "ordering" || suite == "all") {
        auto r = nnim::check_ordering_and_splits(check_n, check_k, check_trials,
                                                 check_seed, check_cap);
        out["ordering"] = {{"trials", r.trials},
                           {"ordering_violations", r.ordering_violations},
                           {"split_violations", r.split_violations},
                           {"fusion_breaks", r.fusion_breaks},
                           {"counterexample", r.counterexample}};
      }
      if (suite == "overlap" || suite == "all") {
        std::mt19937_64 eng(check_seed);
        std::uniform_real_distribution<double> uni(0, 1);
        nnim::Matrix xi0(check_n, 4);
        for (int u = 0; u < check_n; ++u)
          for (int i = 0; i < 4; ++i) xi0(u, i) = uni(eng);
        auto r = nnim::knn_overlap_diagnostic(xi0, check_k, 10, check_seed);
        out["overlap"] = {{"mean_jaccard", r.mean_jaccard}};
      }
      std::cout << out.dump(2) << std::endl;
      if (!check_out.empty()) {
        fs::create_directories(check_out);
        write_text((fs::path(check_out) / "check.json").string(),
                   out.dump(2) + "\n");
        std::string tsv = "suite\tmetric\tvalue\n";
        for (auto& [suite_name, vals] : out.items())
          for (auto& [key, val] : vals.items())
            tsv += suite_name + "\t" + key + "\t" + val.dump() + "\n";
        write_text((fs::path(check_out) / "check.tsv").string(), tsv);
      }
      bool ok = true;
      if (out.contains("convergence"))
        ok = ok && out["convergence"]["converged"] == out["convergence"]["trials"] &&
             out["convergence"]["sigma_ok"].get<bool>();
      if (out.contains("bound"))
        ok = ok && out["bound"]["within_budget"].get<bool>();
      if (out.contains("ordering"))
        ok = ok && out["ordering"]["ordering_violations"] == 0 &&
             out["ordering"]["split_violations"] == 0 &&
             out["ordering"]["fusion_breaks"] == 0;
      return ok ? 0 : 4;
    }

    if (*cmd_tables) {
      std::string tsv, md;
      nnim::export_tables(run_dirs, &tsv, &md);
      write_text(tables_prefix + ".tsv", tsv);
      write_text(tables_prefix + ".md", md);
      std::cout << md << std::endl;
      return 0;
    }

    if (*cmd_ego) {
      auto stats = nnim::convert_snap_ego(ego_edges, ego_feat, ego_egofeat,
                                          ego_id, ego_out);
      json j;
      j["nodes"] = stats.nodes;
      j["undirected_friend_edges"] = stats.undirected_friend_edges;
      j["directed_edges"] = stats.directed_edges;
      j["label_dim"] = stats.label_dim;
      std::cout << j.dump(2) << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return exit_code_for(e);
  }
  return 0;
}
