#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sapo/advantage.hpp"
#include "sapo/er_graph.hpp"
#include "sapo/gdcr.hpp"
#include "sapo/sim.hpp"
#include "sapo/trajectory.hpp"

namespace sapo {

// All floats in artifacts go through a 10-significant-digit round trip so
// golden files and service responses are stable.
std::string format_double(double x);
double snap_double(double x);
nlohmann::json jnum(double x);

// Graph file: {graph_id, answer, triples: [[s, r, o], ...], aliases: {...}}.
nlohmann::json graph_to_json(const ErGraph& graph);
ErGraph graph_from_json(const nlohmann::json& j);

nlohmann::json world_to_json(const WorldGraph& world);
WorldGraph world_from_json(const nlohmann::json& j);

nlohmann::json task_to_json(const TaskInstance& task);
TaskInstance task_from_json(const nlohmann::json& j);

// scores.jsonl record: step rewards plus outcome, self-contained for analysis.
nlohmann::json score_record_to_json(const StepRewardSeries& series, const OutcomeReward& outcome);
void score_record_from_json(const nlohmann::json& j, StepRewardSeries& series,
                            OutcomeReward& outcome);

// advantages.jsonl record.
nlohmann::json advantage_record_to_json(const std::string& trajectory_id,
                                        const StepRewardSeries& series,
                                        const AdvantageTensor& tensor);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace sapo
