#include "sapo/json_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sapo/text_norm.hpp"

namespace sapo {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

double snap_double(double x) { return std::strtod(format_double(x).c_str(), nullptr); }

json jnum(double x) { return json(snap_double(x)); }

json graph_to_json(const ErGraph& graph) {
  json triples = json::array();
  for (const auto& e : graph.edges()) {
    triples.push_back({graph.nodes()[e.src].canonical_label, e.relation,
                       graph.nodes()[e.dst].canonical_label});
  }
  json aliases = json::object();
  for (const EntityNode& n : graph.nodes()) {
    if (!n.aliases.empty()) aliases[n.canonical_label] = n.aliases;
  }
  return {{"graph_id", graph.graph_id()},
          {"answer", graph.nodes()[graph.answer_index()].canonical_label},
          {"triples", triples},
          {"aliases", aliases}};
}

ErGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw Error(Err::ParseError, "graph record is not an object");
  if (!j.contains("triples") || !j["triples"].is_array()) {
    throw Error(Err::ParseError, "graph record has no triples array");
  }
  std::vector<Triple> triples;
  for (const json& t : j["triples"]) {
    if (!t.is_array() || t.size() != 3) {
      throw Error(Err::ParseError, "triple is not a [subject, relation, object] array");
    }
    triples.push_back(Triple{t[0].get<std::string>(), t[1].get<std::string>(),
                             t[2].get<std::string>()});
  }
  if (!j.contains("answer")) throw Error(Err::ParseError, "graph record has no answer");
  ErGraph g = build_graph(triples, j["answer"].get<std::string>(), j.value("graph_id", ""));
  if (j.contains("aliases") && j["aliases"].is_object()) {
    std::unordered_map<std::string, std::vector<std::string>> aliases;
    for (auto it = j["aliases"].begin(); it != j["aliases"].end(); ++it) {
      aliases[it.key()] = it.value().get<std::vector<std::string>>();
    }
    g = with_aliases(g, aliases);
  }
  return g;
}

json world_to_json(const WorldGraph& world) {
  json edges = json::array();
  for (int u = 0; u < world.node_count; ++u) {
    for (int v : world.adjacency[u]) {
      if (u < v) edges.push_back({u, v});
    }
  }
  return {{"seed", world.seed},
          {"node_count", world.node_count},
          {"mean_degree", jnum(world.mean_degree)},
          {"connected", world.connected},
          {"labels", world.labels},
          {"edges", edges}};
}

WorldGraph world_from_json(const json& j) {
  WorldGraph w;
  w.seed = j.value("seed", 0ULL);
  w.node_count = j.at("node_count").get<int>();
  w.mean_degree = j.value("mean_degree", 0.0);
  w.connected = j.value("connected", false);
  w.labels = j.at("labels").get<std::vector<std::string>>();
  if (static_cast<int>(w.labels.size()) != w.node_count) {
    throw Error(Err::ParseError, "world label count does not match node_count");
  }
  w.adjacency.assign(w.node_count, {});
  for (const json& e : j.at("edges")) {
    const int a = e.at(0).get<int>();
    const int b = e.at(1).get<int>();
    if (a < 0 || b < 0 || a >= w.node_count || b >= w.node_count) {
      throw Error(Err::ParseError, "world edge endpoint out of range");
    }
    w.adjacency[a].push_back(b);
    w.adjacency[b].push_back(a);
  }
  for (auto& adj : w.adjacency) std::sort(adj.begin(), adj.end());
  for (int i = 0; i < w.node_count; ++i) w.index.emplace(normalize_text(w.labels[i]), i);
  return w;
}

json task_to_json(const TaskInstance& task) {
  return {{"task_id", task.task_id},
          {"question_entities", task.question_entities},
          {"answer_node", task.answer_node},
          {"question_text", task.question_text},
          {"gold_answer", task.gold_answer},
          {"graph", graph_to_json(task.task_graph)}};
}

TaskInstance task_from_json(const json& j) {
  TaskInstance task;
  task.task_id = j.at("task_id").get<std::string>();
  task.question_entities = j.at("question_entities").get<std::vector<std::string>>();
  task.answer_node = j.at("answer_node").get<std::string>();
  task.question_text = j.value("question_text", "");
  task.gold_answer = j.at("gold_answer").get<std::string>();
  task.task_graph = graph_from_json(j.at("graph"));
  return task;
}

namespace {

json distance_to_json(const Distance& d) {
  if (!d.reachable()) return "unreachable";
  return d.hops;
}

Distance distance_from_json(const json& j) {
  if (j.is_string()) return Distance::unreachable();
  return Distance::of(j.get<int>());
}

}  // namespace

json score_record_to_json(const StepRewardSeries& series, const OutcomeReward& outcome) {
  json steps = json::array();
  for (const StepReward& s : series.steps) {
    json step = {{"r_cite", jnum(s.r_cite)},
                 {"r_ret", jnum(s.r_ret)},
                 {"r_g", jnum(s.r_g)},
                 {"delta_cited", json(s.delta_cited)},
                 {"delta_retrieved", json(s.delta_retrieved)}};
    if (s.step_distance) {
      step["d"] = distance_to_json(*s.step_distance);
    } else {
      step["d"] = nullptr;
    }
    steps.push_back(std::move(step));
  }
  json distances = json::object();
  for (const auto& [id, d] : series.node_distances) distances[id] = distance_to_json(d);
  return {{"trajectory_id", series.trajectory_id},
          {"graph_id", series.graph_id},
          {"outcome",
           {{"correctness", outcome.correctness},
            {"format_valid", outcome.format_valid},
            {"scalar", jnum(outcome.scalar())}}},
          {"steps", steps},
          {"node_distances", distances}};
}

void score_record_from_json(const json& j, StepRewardSeries& series, OutcomeReward& outcome) {
  series = StepRewardSeries{};
  series.trajectory_id = j.value("trajectory_id", "");
  series.graph_id = j.value("graph_id", "");
  std::set<NodeId> cited, retrieved;
  for (const json& sj : j.at("steps")) {
    StepReward s;
    s.r_cite = sj.value("r_cite", 0.0);
    s.r_ret = sj.value("r_ret", 0.0);
    s.r_g = sj.value("r_g", 0.0);
    if (sj.contains("d") && !sj["d"].is_null()) s.step_distance = distance_from_json(sj["d"]);
    if (sj.contains("delta_cited")) {
      for (const json& id : sj["delta_cited"]) s.delta_cited.insert(id.get<std::string>());
    }
    if (sj.contains("delta_retrieved")) {
      for (const json& id : sj["delta_retrieved"]) s.delta_retrieved.insert(id.get<std::string>());
    }
    cited.insert(s.delta_cited.begin(), s.delta_cited.end());
    retrieved.insert(s.delta_retrieved.begin(), s.delta_retrieved.end());
    s.cited_cumulative = cited;
    s.retrieved_cumulative = retrieved;
    series.steps.push_back(std::move(s));
  }
  if (j.contains("node_distances")) {
    for (auto it = j["node_distances"].begin(); it != j["node_distances"].end(); ++it) {
      series.node_distances.emplace(it.key(), distance_from_json(it.value()));
    }
  }
  outcome = OutcomeReward{};
  if (j.contains("outcome")) {
    outcome.correctness = j["outcome"].value("correctness", 0);
    outcome.format_valid = j["outcome"].value("format_valid", 0);
  }
}

json advantage_record_to_json(const std::string& trajectory_id, const StepRewardSeries& series,
                              const AdvantageTensor& tensor) {
  json steps = json::array();
  for (size_t t = 0; t < series.steps.size(); ++t) {
    steps.push_back({{"r_cite", jnum(series.steps[t].r_cite)},
                     {"r_ret", jnum(series.steps[t].r_ret)},
                     {"r_g", jnum(series.steps[t].r_g)},
                     {"step_advantage", jnum(tensor.step_advantage[t])},
                     {"combined", jnum(tensor.combined[t])}});
  }
  return {{"trajectory_id", trajectory_id},
          {"outcome_advantage", jnum(tensor.outcome_advantage)},
          {"steps", steps}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Err::IoError, "cannot write " + path.string());
  out << content;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Err::IoError, "cannot read " + path.string());
  std::vector<json> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Err::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(Err::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace sapo
