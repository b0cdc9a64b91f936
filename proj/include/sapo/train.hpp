#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sapo/advantage.hpp"
#include "sapo/policy.hpp"
#include "sapo/sim.hpp"

namespace sapo {

struct EnvConfig {
  int nodes = 200;
  double mean_degree = 4.0;
  int tasks = 100;
  int walk_length = 5;
  int min_depth = 3;  // resample tasks whose answer sits closer than this
  int max_steps = 20;
  int top_k = 5;
  double distractor_rate = 0.1;
  bool policy_cite = false;
  int tasks_per_iter = 16;
  int eval_rollouts = 4;
  int synthesis_retries = 50;
  std::optional<NoiseSpec> noise;  // corruption of the reward graphs only
};

// Synthesize `count` validated tasks, resampling below min_depth; task ids
// are task-0..task-{count-1} and double as graph ids.
std::vector<TaskInstance> synthesize_corpus(const WorldGraph& world, int count, int walk_length,
                                            int min_depth, uint64_t seed,
                                            int max_retries = 50);

struct TrainConfig {
  uint64_t seed = 1;
  int group_size = 8;
  double lambda = 0.5;
  double k = 2.0;
  double eps_low = 0.2;
  double eps_high = 0.28;
  double learning_rate = 0.05;
  int iterations = 150;
  double temperature = 1.0;
  EnvConfig env;
};

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

struct IterationMetrics {
  int iteration = 0;
  double success_rate = 0.0;       // over the iteration's rollouts
  double mean_r_g = 0.0;           // mean per-step GDCR
  double mean_best_distance = 0.0; // mean final history-best distance (reachable only)
  double objective = 0.0;          // surrogate at the rollout parameters
};

struct EvalRecord {
  Trajectory trajectory;
  StepRewardSeries series;
  OutcomeReward outcome;
  AdvantageTensor advantages;
};

struct TrainResult {
  PolicyParams params;
  std::vector<IterationMetrics> metrics;
  WorldGraph world;
  std::vector<TaskInstance> tasks;
  std::vector<EvalRecord> eval;  // final-policy evaluation rollouts
  double final_success_rate = 0.0;
};

// Group-sampled policy ascent: per iteration, G rollouts for each sampled
// task, GDCR scoring, advantage combination, one gradient step on the
// surrogate. Deterministic for a fixed config.
TrainResult train(const TrainConfig& config);

}  // namespace sapo
