#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sapo {

struct ActionRecord {
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
};

struct Step {
  std::string thought;
  ActionRecord action;
  std::string observation;  // may be empty for the final step
};

struct Trajectory {
  std::string trajectory_id;
  std::string query;
  std::vector<Step> steps;
  std::optional<std::string> final_answer;
  std::string graph_id;  // optional join key for multi-graph score runs
};

nlohmann::json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

// Parses a raw transcript in the tagged text format:
//   <think>...</think>, <tool_call>{json}</tool_call>,
//   <tool_response>...</tool_response>, <answer>...</answer>,
// optionally wrapped in <|im_start|>role ... <|im_end|> turns. Each <think>
// opens a step; an <answer> closes the trajectory.
Trajectory parse_tagged_trajectory(std::string_view text, const std::string& trajectory_id);

}  // namespace sapo
