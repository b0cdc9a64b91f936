// sapo: graph-distance step rewards and step-advantage policy optimization
// for a simulated search environment.
//
// Subcommands:
//   synth    generate a world graph and a validated task corpus
//   score    score trajectories against their graphs (GDCR)
//   train    run the policy optimizer and write run artifacts
//   analyze  distance tables, correlation, progress and citation curves
//   serve    scoring service over stdin/stdout (or HTTP with --http)

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "sapo/analysis.hpp"
#include "sapo/json_io.hpp"
#include "sapo/rng.hpp"
#include "sapo/run_dir.hpp"
#include "sapo/service.hpp"
#include "sapo/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int cmd_synth(int nodes, double degree, int tasks, int walk_length, int min_depth,
              uint64_t seed, const std::string& out_dir, bool force) {
  sapo::WorldGraph world = sapo::generate_world(nodes, degree, sapo::derive_seed(seed, 1));

  std::vector<json> task_records;
  int valid = 0;
  int rejected_final = 0;
  try {
    const std::vector<sapo::TaskInstance> corpus =
        sapo::synthesize_corpus(world, tasks, walk_length, min_depth, seed);
    for (const auto& task : corpus) task_records.push_back(sapo::task_to_json(task));
    valid = static_cast<int>(corpus.size());
  } catch (const sapo::Error& e) {
    if (e.code() != sapo::Err::SynthesisExhausted) throw;
    rejected_final = tasks;  // the corpus could not be completed
  }

  json config = {{"command", "synth"},       {"nodes", nodes},
                 {"degree", degree},         {"tasks", tasks},
                 {"walk_length", walk_length}, {"min_depth", min_depth},
                 {"seed", seed}};
  sapo::RunDirectory dir = sapo::RunDirectory::create(out_dir, config, force);
  dir.write_json("world.json", sapo::world_to_json(world));
  dir.write_jsonl("tasks.jsonl", task_records);

  std::cout << valid << " valid / " << rejected_final << " rejected-final\n";
  return rejected_final > 0 ? 1 : 0;
}

std::map<std::string, sapo::ErGraph> load_graphs(const std::string& path) {
  std::map<std::string, sapo::ErGraph> graphs;
  const std::string text = sapo::read_text_file(path);
  // Accept a single JSON object, a JSON array of graphs, or JSONL.
  json parsed;
  bool whole_file = true;
  try {
    parsed = json::parse(text);
  } catch (const json::exception&) {
    whole_file = false;
  }
  auto add = [&graphs](const json& j) {
    sapo::ErGraph g = sapo::graph_from_json(j.contains("graph") ? j["graph"] : j);
    graphs.emplace(g.graph_id(), std::move(g));
  };
  if (whole_file) {
    if (parsed.is_array()) {
      for (const json& j : parsed) add(j);
    } else {
      add(parsed);
    }
  } else {
    for (const json& j : sapo::read_jsonl(path)) add(j);
  }
  return graphs;
}

int cmd_score(const std::string& graphs_path, const std::string& traj_path, double k,
              const std::string& out_path, const std::string& format, bool plural_fold,
              bool substring) {
  const std::map<std::string, sapo::ErGraph> graphs = load_graphs(graphs_path);
  std::map<std::string, sapo::Lexicon> lexicons;
  for (const auto& [id, g] : graphs) lexicons.emplace(id, sapo::build_lexicon(g));

  sapo::MatchOptions options;
  options.plural_fold = plural_fold;
  options.word_boundaries = !substring;

  std::vector<sapo::Trajectory> trajectories;
  std::vector<json> error_records;
  if (format == "tagged") {
    const std::string text = sapo::read_text_file(traj_path);
    trajectories.push_back(
        sapo::parse_tagged_trajectory(text, fs::path(traj_path).stem().string()));
  } else {
    size_t line_no = 0;
    for (const json& j : sapo::read_jsonl_artifact(traj_path)) {
      ++line_no;
      try {
        trajectories.push_back(sapo::trajectory_from_json(j));
      } catch (const sapo::Error& e) {
        error_records.push_back({{"line", line_no},
                                 {"error", {{"code", sapo::err_name(e.code())},
                                            {"message", e.what()}}}});
      }
    }
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw sapo::Error(sapo::Err::IoError, "cannot write " + out_path);

  size_t scored_count = 0;
  for (const sapo::Trajectory& traj : trajectories) {
    std::string graph_id = traj.graph_id;
    if (graph_id.empty() && graphs.size() == 1) graph_id = graphs.begin()->first;
    auto git = graphs.find(graph_id);
    if (git == graphs.end()) {
      error_records.push_back(
          {{"trajectory_id", traj.trajectory_id},
           {"error",
            {{"code", "GraphNotFound"},
             {"message", "no graph with id '" + graph_id + "' was loaded"}}}});
      continue;
    }
    try {
      const sapo::StepRewardSeries series =
          sapo::score_trajectory(traj, git->second, lexicons.at(graph_id), k, options);
      const sapo::EntityNode& answer = git->second.nodes()[git->second.answer_index()];
      const sapo::OutcomeReward outcome =
          sapo::outcome_reward(traj, answer.canonical_label, answer.aliases);
      out << sapo::score_record_to_json(series, outcome).dump() << '\n';
      ++scored_count;
    } catch (const sapo::Error& e) {
      error_records.push_back(
          {{"trajectory_id", traj.trajectory_id},
           {"error", {{"code", sapo::err_name(e.code())}, {"message", e.what()}}}});
    }
  }
  for (const json& rec : error_records) out << rec.dump() << '\n';

  std::cout << scored_count << " scored, " << error_records.size() << " errors\n";
  return error_records.empty() ? 0 : 1;
}

int cmd_train(const std::string& config_path, const std::string& mode,
              const std::string& out_dir, bool force) {
  json raw = sapo::read_json_file(config_path);
  sapo::TrainConfig config = sapo::train_config_from_json(raw);
  if (mode == "grpo") config.lambda = 0.0;

  const json effective = sapo::train_config_to_json(config);
  sapo::RunDirectory dir = sapo::RunDirectory::create(out_dir, effective, force);

  const sapo::TrainResult result = sapo::train(config);

  dir.write_json("world.json", sapo::world_to_json(result.world));
  std::vector<json> task_records;
  for (const auto& task : result.tasks) task_records.push_back(sapo::task_to_json(task));
  dir.write_jsonl("tasks.jsonl", task_records);

  std::vector<json> metric_records;
  for (const auto& m : result.metrics) {
    metric_records.push_back({{"iteration", m.iteration},
                              {"success_rate", sapo::jnum(m.success_rate)},
                              {"mean_r_g", sapo::jnum(m.mean_r_g)},
                              {"mean_best_distance", sapo::jnum(m.mean_best_distance)},
                              {"objective", sapo::jnum(m.objective)}});
  }
  dir.write_jsonl("metrics.jsonl", metric_records);

  std::vector<json> traj_records, score_records, adv_records;
  for (const auto& rec : result.eval) {
    traj_records.push_back(sapo::trajectory_to_json(rec.trajectory));
    score_records.push_back(sapo::score_record_to_json(rec.series, rec.outcome));
    adv_records.push_back(
        sapo::advantage_record_to_json(rec.trajectory.trajectory_id, rec.series, rec.advantages));
  }
  dir.write_jsonl("trajectories.jsonl", traj_records);
  dir.write_jsonl("scores.jsonl", score_records);
  dir.write_jsonl("advantages.jsonl", adv_records);

  json weights = json::object();
  for (int c = 0; c < sapo::kFeatureCount; ++c) {
    weights[sapo::feature_name(c)] = sapo::jnum(result.params.feature_weights[c]);
  }
  json cite_weights = json::object();
  for (int c = 0; c < sapo::kFeatureCount; ++c) {
    cite_weights[sapo::feature_name(c)] = sapo::jnum(result.params.cite_weights[c]);
  }
  dir.write_json("params.json", {{"feature_weights", weights},
                                 {"cite_weights", cite_weights},
                                 {"temperature", sapo::jnum(result.params.temperature)}});
  dir.write_json("report.json",
                 {{"final_success_rate", sapo::jnum(result.final_success_rate)},
                  {"iterations", config.iterations},
                  {"lambda", sapo::jnum(config.lambda)},
                  {"eval_trajectories", static_cast<int>(result.eval.size())}});

  std::cout << "final success rate " << sapo::format_double(result.final_success_rate) << " over "
            << result.eval.size() << " eval rollouts\n";
  return 0;
}

int cmd_analyze(const std::string& scores_path, const std::string& out_dir, int max_step,
                int bins, bool force) {
  std::vector<sapo::ScoredTrajectory> scored;
  for (const json& j : sapo::read_jsonl_artifact(scores_path)) {
    if (j.contains("error")) continue;  // skip error records from score runs
    sapo::ScoredTrajectory st;
    sapo::score_record_from_json(j, st.series, st.outcome);
    scored.push_back(std::move(st));
  }
  if (scored.empty()) {
    std::cerr << "error: no scored trajectories in " << scores_path << "\n";
    return 1;
  }

  json config = {{"command", "analyze"},
                 {"scores", scores_path},
                 {"max_step", max_step},
                 {"bins", bins}};
  sapo::RunDirectory dir = sapo::RunDirectory::create(out_dir, config, force);

  const sapo::DistanceTable table = sapo::distance_table(scored, max_step);
  dir.write_text("distance_table.csv", sapo::distance_table_csv(table));

  json correlation;
  try {
    const sapo::CorrelationResult corr = sapo::gdcr_correctness_correlation(scored);
    correlation = {{"r", sapo::jnum(corr.r)}, {"n", corr.n}, {"p_note", corr.p_note}};
  } catch (const sapo::Error& e) {
    correlation = {{"error", sapo::err_name(e.code())}, {"note", e.what()}};
  }
  dir.write_json("correlation.json", correlation);

  const auto curve = sapo::progress_curve(scored, bins);
  dir.write_text("progress_curve.csv", sapo::progress_curve_csv(curve));

  const auto cited = sapo::cited_fraction_by_distance(scored);
  dir.write_text("cited_fraction.csv", sapo::cited_fraction_csv(cited));

  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = {{"step", row.step},
              {"correct_count", row.correct_count},
              {"incorrect_count", row.incorrect_count}};
    if (row.correct_mean) r["correct_mean"] = sapo::jnum(*row.correct_mean);
    if (row.incorrect_mean) r["incorrect_mean"] = sapo::jnum(*row.incorrect_mean);
    if (row.diff) r["diff"] = sapo::jnum(*row.diff);
    rows.push_back(std::move(r));
  }
  json curve_json = json::array();
  for (const auto& b : curve) {
    json r = {{"bin", b.bin}, {"count", b.count}};
    if (b.mean_distance) r["mean_distance"] = sapo::jnum(*b.mean_distance);
    curve_json.push_back(std::move(r));
  }
  json cited_json = json::array();
  for (const auto& b : cited) {
    cited_json.push_back({{"distance", b.distance},
                          {"retrieved", b.retrieved},
                          {"cited", b.cited},
                          {"fraction", sapo::jnum(b.fraction)}});
  }
  dir.write_json("report.json", {{"distance_table", rows},
                                 {"correlation", correlation},
                                 {"progress_curve", curve_json},
                                 {"cited_fraction", cited_json},
                                 {"trajectories", static_cast<int>(scored.size())}});
  std::cout << "analyzed " << scored.size() << " trajectories\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-distance step rewards and step-advantage policy optimization"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a world graph and task corpus");
  int nodes = 200;
  double degree = 4.0;
  int tasks = 100;
  int walk_length = 5;
  int min_depth = 3;
  uint64_t seed = 7;
  std::string out_dir = "runs/synth";
  bool force = false;
  synth->add_option("--nodes", nodes, "world node count")->check(CLI::Range(10, 1000000));
  synth->add_option("--degree", degree, "world mean degree")->check(CLI::Range(2.0, 1e6));
  synth->add_option("--tasks", tasks, "number of tasks")->check(CLI::PositiveNumber);
  synth->add_option("--walk-length", walk_length, "random walk length")
      ->check(CLI::Range(2, 1000));
  synth->add_option("--min-depth", min_depth, "minimum answer distance from the question entity")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", seed, "base seed");
  synth->add_option("--out", out_dir, "output directory");
  synth->add_flag("--force", force, "overwrite an existing run directory");

  // score
  auto* score = app.add_subcommand("score", "score trajectories with GDCR");
  std::string graphs_path, traj_path, out_path = "scores.jsonl", format = "jsonl";
  double k = 2.0;
  bool plural_fold = false, substring = false;
  score->add_option("--graphs", graphs_path, "graph file (JSON, JSON array, or JSONL)")
      ->required();
  score->add_option("--trajectories", traj_path, "trajectory JSONL or tagged transcript")
      ->required();
  score->add_option("--k", k, "contribution decay factor")->check(CLI::Range(1.0, 1e6));
  score->add_option("--out", out_path, "output scores.jsonl");
  score->add_option("--format", format, "input format")
      ->check(CLI::IsMember({"jsonl", "tagged"}));
  score->add_flag("--plural-fold", plural_fold, "also match plural surface forms");
  score->add_flag("--substring", substring, "match without word boundaries");

  // train
  auto* train_cmd = app.add_subcommand("train", "optimize the search policy");
  std::string config_path, mode = "sapo", train_out = "runs/train";
  bool train_force = false;
  train_cmd->add_option("--config", config_path, "train config JSON")->required();
  train_cmd->add_option("--mode", mode, "sapo or grpo (grpo forces lambda=0)")
      ->check(CLI::IsMember({"sapo", "grpo"}));
  train_cmd->add_option("--out", train_out, "run directory");
  train_cmd->add_flag("--force", train_force, "overwrite an existing run directory");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "diagnostic tables from scores");
  std::string scores_path, analyze_out = "runs/analysis";
  int max_step = 20, bins = 10;
  bool analyze_force = false;
  analyze->add_option("--scores", scores_path, "scores.jsonl")->required();
  analyze->add_option("--out", analyze_out, "output directory");
  analyze->add_option("--max-step", max_step, "distance table rows")->check(CLI::PositiveNumber);
  analyze->add_option("--bins", bins, "progress curve bins")->check(CLI::PositiveNumber);
  analyze->add_flag("--force", analyze_force, "overwrite an existing run directory");

  // serve
  auto* serve = app.add_subcommand("serve", "scoring service (pipe mode by default)");
  int http_port = 0;
  int workers = 4;
  serve->add_option("--http", http_port, "serve HTTP on this port instead of stdin/stdout");
  serve->add_option("--workers", workers, "pipe-mode worker threads")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(nodes, degree, tasks, walk_length, min_depth, seed, out_dir, force);
    }
    if (score->parsed()) {
      return cmd_score(graphs_path, traj_path, k, out_path, format, plural_fold, substring);
    }
    if (train_cmd->parsed()) return cmd_train(config_path, mode, train_out, train_force);
    if (analyze->parsed()) return cmd_analyze(scores_path, analyze_out, max_step, bins, analyze_force);
    if (serve->parsed()) {
      if (http_port > 0) return sapo::run_http_server(http_port);
      sapo::run_pipe_server(std::cin, std::cout, workers);
      return 0;
    }
  } catch (const sapo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
