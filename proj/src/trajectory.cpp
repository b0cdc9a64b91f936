#include "sapo/trajectory.hpp"

#include "sapo/error.hpp"

namespace sapo {

using nlohmann::json;

json trajectory_to_json(const Trajectory& traj) {
  json steps = json::array();
  for (const Step& s : traj.steps) {
    steps.push_back({{"thought", s.thought},
                     {"action", {{"name", s.action.name}, {"arguments", s.action.arguments}}},
                     {"observation", s.observation}});
  }
  json j = {{"trajectory_id", traj.trajectory_id}, {"query", traj.query}, {"steps", steps}};
  if (traj.final_answer) {
    j["final_answer"] = *traj.final_answer;
  } else {
    j["final_answer"] = nullptr;
  }
  if (!traj.graph_id.empty()) j["graph_id"] = traj.graph_id;
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  if (!j.is_object()) throw Error(Err::ParseError, "trajectory record is not an object");
  Trajectory traj;
  traj.trajectory_id = j.value("trajectory_id", "");
  traj.query = j.value("query", "");
  traj.graph_id = j.value("graph_id", "");
  if (j.contains("final_answer") && !j["final_answer"].is_null()) {
    traj.final_answer = j["final_answer"].get<std::string>();
  }
  if (!j.contains("steps") || !j["steps"].is_array()) {
    throw Error(Err::ParseError, "trajectory '" + traj.trajectory_id + "' has no steps array");
  }
  for (const json& sj : j["steps"]) {
    Step s;
    s.thought = sj.value("thought", "");
    s.observation = sj.value("observation", "");
    if (sj.contains("action") && sj["action"].is_object()) {
      s.action.name = sj["action"].value("name", "");
      if (sj["action"].contains("arguments")) s.action.arguments = sj["action"]["arguments"];
    }
    traj.steps.push_back(std::move(s));
  }
  return traj;
}

namespace {

struct Tag {
  std::string_view name;  // think, tool_call, tool_response, answer
  std::string_view body;
  size_t pos;
};

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<Tag> scan_tags(std::string_view text) {
  static const std::string_view kNames[] = {"think", "tool_call", "tool_response", "answer"};
  std::vector<Tag> tags;
  size_t pos = 0;
  while (true) {
    size_t best = std::string_view::npos;
    std::string_view best_name;
    for (std::string_view name : kNames) {
      const std::string open = "<" + std::string(name) + ">";
      const size_t at = text.find(open, pos);
      if (at != std::string_view::npos && at < best) {
        best = at;
        best_name = name;
      }
    }
    if (best == std::string_view::npos) break;
    const std::string open = "<" + std::string(best_name) + ">";
    const std::string close = "</" + std::string(best_name) + ">";
    const size_t body_begin = best + open.size();
    const size_t body_end = text.find(close, body_begin);
    if (body_end == std::string_view::npos) {
      throw Error(Err::ParseError, "unterminated <" + std::string(best_name) + "> block");
    }
    tags.push_back(Tag{best_name, text.substr(body_begin, body_end - body_begin), best});
    pos = body_end + close.size();
  }
  return tags;
}

}  // namespace

Trajectory parse_tagged_trajectory(std::string_view text, const std::string& trajectory_id) {
  Trajectory traj;
  traj.trajectory_id = trajectory_id;

  const std::vector<Tag> tags = scan_tags(text);
  if (tags.empty()) throw Error(Err::ParseError, "no tagged blocks found");

  // The query is the first user turn if the chat markers are present,
  // otherwise everything before the first tag.
  const std::string_view user_marker = "<|im_start|>user";
  const std::string_view end_marker = "<|im_end|>";
  const size_t user_at = text.find(user_marker);
  if (user_at != std::string_view::npos && user_at < tags.front().pos) {
    const size_t q_begin = user_at + user_marker.size();
    const size_t q_end = text.find(end_marker, q_begin);
    if (q_end != std::string_view::npos) traj.query = trim(text.substr(q_begin, q_end - q_begin));
  } else {
    traj.query = trim(text.substr(0, tags.front().pos));
  }

  Step step;
  bool open = false;
  for (const Tag& tag : tags) {
    if (tag.name == "think") {
      if (open) traj.steps.push_back(std::move(step));
      step = Step{};
      step.thought = trim(tag.body);
      open = true;
    } else if (tag.name == "tool_call") {
      if (!open) throw Error(Err::ParseError, "<tool_call> before any <think>");
      json call;
      try {
        call = json::parse(trim(tag.body));
      } catch (const json::exception& e) {
        throw Error(Err::ParseError, std::string("malformed tool_call JSON: ") + e.what());
      }
      step.action.name = call.value("name", "");
      if (call.contains("arguments")) step.action.arguments = call["arguments"];
    } else if (tag.name == "tool_response") {
      if (!open) throw Error(Err::ParseError, "<tool_response> before any <think>");
      step.observation = trim(tag.body);
      traj.steps.push_back(std::move(step));
      step = Step{};
      open = false;
    } else if (tag.name == "answer") {
      if (!open) {
        step = Step{};
        open = true;
      }
      step.action.name = "answer";
      traj.final_answer = trim(tag.body);
      traj.steps.push_back(std::move(step));
      step = Step{};
      open = false;
    }
  }
  if (open) traj.steps.push_back(std::move(step));

  if (traj.steps.empty()) throw Error(Err::ParseError, "transcript contains no steps");
  return traj;
}

}  // namespace sapo
