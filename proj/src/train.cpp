#include "sapo/train.hpp"

#include <algorithm>
#include <cmath>

#include "sapo/rng.hpp"

namespace sapo {

using nlohmann::json;

namespace {

// Seed stream tags; keep stable so runs replay byte-for-byte.
enum : uint64_t {
  kStreamWorld = 1,
  kStreamTasks = 2,
  kStreamShuffle = 3,
  kStreamRollout = 4,
  kStreamEval = 5,
};

}  // namespace

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  if (!j.is_object()) throw Error(Err::InvalidConfig, "train config must be a JSON object");
  c.seed = j.value("seed", c.seed);
  c.group_size = j.value("group_size", c.group_size);
  c.lambda = j.value("lambda", c.lambda);
  c.k = j.value("k", c.k);
  c.eps_low = j.value("eps_low", c.eps_low);
  c.eps_high = j.value("eps_high", c.eps_high);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.iterations = j.value("iterations", c.iterations);
  c.temperature = j.value("temperature", c.temperature);
  if (j.contains("env")) {
    const json& e = j["env"];
    c.env.nodes = e.value("nodes", c.env.nodes);
    c.env.mean_degree = e.value("mean_degree", c.env.mean_degree);
    c.env.tasks = e.value("tasks", c.env.tasks);
    c.env.walk_length = e.value("walk_length", c.env.walk_length);
    c.env.min_depth = e.value("min_depth", c.env.min_depth);
    c.env.max_steps = e.value("max_steps", c.env.max_steps);
    c.env.top_k = e.value("top_k", c.env.top_k);
    c.env.distractor_rate = e.value("distractor_rate", c.env.distractor_rate);
    c.env.policy_cite = e.value("policy_cite", c.env.policy_cite);
    c.env.tasks_per_iter = e.value("tasks_per_iter", c.env.tasks_per_iter);
    c.env.eval_rollouts = e.value("eval_rollouts", c.env.eval_rollouts);
    c.env.synthesis_retries = e.value("synthesis_retries", c.env.synthesis_retries);
    if (e.contains("noise") && !e["noise"].is_null()) {
      NoiseSpec spec;
      spec.mode = noise_mode_from_name(e["noise"].value("mode", "node_deletion"));
      spec.rate = e["noise"].value("rate", 0.0);
      spec.seed = e["noise"].value("seed", 0ULL);
      c.env.noise = spec;
    }
  }
  if (c.group_size < 2) throw Error(Err::InvalidConfig, "group_size must be at least 2");
  if (c.lambda < 0.0) throw Error(Err::InvalidConfig, "lambda must be non-negative");
  if (c.k < 1.0) throw Error(Err::InvalidConfig, "k must be at least 1");
  if (c.iterations < 0) throw Error(Err::InvalidConfig, "iterations must be non-negative");
  if (c.eps_low <= 0.0 || c.eps_low >= 1.0) {
    throw Error(Err::InvalidConfig, "eps_low must lie in (0, 1)");
  }
  if (c.eps_high < c.eps_low) throw Error(Err::InvalidConfig, "eps_high must be >= eps_low");
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  json env = {{"nodes", c.env.nodes},
              {"mean_degree", c.env.mean_degree},
              {"tasks", c.env.tasks},
              {"walk_length", c.env.walk_length},
              {"min_depth", c.env.min_depth},
              {"max_steps", c.env.max_steps},
              {"top_k", c.env.top_k},
              {"distractor_rate", c.env.distractor_rate},
              {"policy_cite", c.env.policy_cite},
              {"tasks_per_iter", c.env.tasks_per_iter},
              {"eval_rollouts", c.env.eval_rollouts},
              {"synthesis_retries", c.env.synthesis_retries}};
  if (c.env.noise) {
    env["noise"] = {{"mode", noise_mode_name(c.env.noise->mode)},
                    {"rate", c.env.noise->rate},
                    {"seed", c.env.noise->seed}};
  } else {
    env["noise"] = nullptr;
  }
  return {{"seed", c.seed},
          {"group_size", c.group_size},
          {"lambda", c.lambda},
          {"k", c.k},
          {"eps_low", c.eps_low},
          {"eps_high", c.eps_high},
          {"learning_rate", c.learning_rate},
          {"iterations", c.iterations},
          {"temperature", c.temperature},
          {"env", env}};
}

namespace {

struct ScoredGroup {
  TrajectoryGroup group;
  std::vector<AdvantageTensor> advantages;
  int successes = 0;
};

ScoredGroup run_group(const TrainConfig& config, const PolicyParams& params,
                      const TaskInstance& task, const ErGraph& reward_graph,
                      const Lexicon& lexicon, const WorldGraph& world, uint64_t group_seed,
                      int rollouts) {
  RolloutConfig rc;
  rc.max_steps = config.env.max_steps;
  rc.top_k = config.env.top_k;
  rc.distractor_rate = config.env.distractor_rate;
  rc.policy_cite = config.env.policy_cite;

  ScoredGroup out;
  out.group.query_id = task.task_id;
  std::vector<StepRewardSeries> series;
  std::vector<OutcomeReward> outcomes;
  for (int g = 0; g < rollouts; ++g) {
    RolloutResult rr = rollout(params, task, world, rc, derive_seed(group_seed, g));
    GroupMember member;
    member.series = score_trajectory(rr.trajectory, reward_graph, lexicon, config.k);
    member.outcome = outcome_reward(rr.trajectory, task.gold_answer);
    out.successes += member.outcome.correctness;
    series.push_back(member.series);
    outcomes.push_back(member.outcome);
    member.trajectory = std::move(rr.trajectory);
    member.decisions = std::move(rr.decisions);
    out.group.members.push_back(std::move(member));
  }
  out.advantages = build_advantages(series, outcomes, config.lambda);
  return out;
}

}  // namespace

std::vector<TaskInstance> synthesize_corpus(const WorldGraph& world, int count, int walk_length,
                                            int min_depth, uint64_t seed, int max_retries) {
  std::vector<TaskInstance> tasks;
  uint64_t salt = 0;
  while (static_cast<int>(tasks.size()) < count) {
    TaskInstance task =
        synthesize_task(world, walk_length, derive_seed(seed, 100 + salt++), max_retries);
    const Distance depth = shortest_distance(task.task_graph, task.question_entities.front());
    if (depth.hops < min_depth) {
      if (salt > static_cast<uint64_t>(count) * 200) {
        throw Error(Err::SynthesisExhausted, "min_depth filter rejected too many tasks");
      }
      continue;
    }
    const int i = static_cast<int>(tasks.size());
    task.task_id = "task-" + std::to_string(i);
    // Rebuild the graph under the task id so graph_id matches.
    std::vector<Triple> triples;
    for (const auto& e : task.task_graph.edges()) {
      triples.push_back(Triple{task.task_graph.nodes()[e.src].canonical_label, e.relation,
                               task.task_graph.nodes()[e.dst].canonical_label});
    }
    task.task_graph = build_graph(triples, task.gold_answer, task.task_id);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

TrainResult train(const TrainConfig& config) {
  TrainResult result;
  result.world =
      generate_world(config.env.nodes, config.env.mean_degree, derive_seed(config.seed, kStreamWorld));

  result.tasks = synthesize_corpus(result.world, config.env.tasks, config.env.walk_length,
                                   config.env.min_depth, derive_seed(config.seed, kStreamTasks),
                                   config.env.synthesis_retries);

  // Reward graphs: the env rolls out against the true world, while scoring
  // may see a corrupted graph (noise harness).
  std::vector<ErGraph> reward_graphs;
  std::vector<Lexicon> lexicons;
  reward_graphs.reserve(result.tasks.size());
  for (size_t i = 0; i < result.tasks.size(); ++i) {
    ErGraph graph = result.tasks[i].task_graph;
    if (config.env.noise) {
      NoiseSpec spec = *config.env.noise;
      spec.seed = derive_seed(spec.seed, i);
      graph = corrupt_graph(graph, spec);
    }
    lexicons.push_back(build_lexicon(graph));
    reward_graphs.push_back(std::move(graph));
  }

  PolicyParams params;
  params.temperature = config.temperature;

  const ClipConfig clip{config.eps_low, config.eps_high};
  std::vector<size_t> order(result.tasks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffle_rng(derive_seed(config.seed, kStreamShuffle));
  shuffle_rng.shuffle(order);
  size_t cursor = 0;
  uint64_t group_counter = 0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    std::vector<double> grad_w(params.feature_weights.size(), 0.0);
    std::vector<double> grad_cite(params.cite_weights.size(), 0.0);

    IterationMetrics metrics;
    metrics.iteration = iter;
    int rollout_count = 0;
    int step_count = 0;
    double best_dist_sum = 0.0;
    int best_dist_count = 0;

    const int batch = std::min<int>(config.env.tasks_per_iter, static_cast<int>(order.size()));
    for (int b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        shuffle_rng.shuffle(order);
        cursor = 0;
      }
      const size_t task_idx = order[cursor++];
      const ScoredGroup scored = run_group(
          config, params, result.tasks[task_idx], reward_graphs[task_idx], lexicons[task_idx],
          result.world, derive_seed(config.seed, kStreamRollout + (++group_counter) * 1000),
          config.group_size);

      metrics.objective += surrogate_objective(scored.group, scored.advantages, params, clip);
      const PolicyGradient grad =
          objective_gradient(scored.group, scored.advantages, params, clip);
      for (size_t c = 0; c < grad_w.size(); ++c) grad_w[c] += grad.d_feature_weights[c];
      for (size_t c = 0; c < grad_cite.size(); ++c) grad_cite[c] += grad.d_cite_weights[c];

      rollout_count += static_cast<int>(scored.group.members.size());
      metrics.success_rate += scored.successes;
      for (const GroupMember& m : scored.group.members) {
        for (const StepReward& s : m.series.steps) {
          metrics.mean_r_g += s.r_g;
          ++step_count;
        }
        const auto best = history_best_distance(m.series);
        if (!best.empty() && best.back().reachable()) {
          best_dist_sum += best.back().hops;
          ++best_dist_count;
        }
      }
    }

    if (batch > 0) {
      metrics.objective /= batch;
      metrics.success_rate /= std::max(rollout_count, 1);
      metrics.mean_r_g = step_count > 0 ? metrics.mean_r_g / step_count : 0.0;
      metrics.mean_best_distance = best_dist_count > 0 ? best_dist_sum / best_dist_count : -1.0;
      // Ascent on the batch-mean objective; temperature stays fixed.
      for (size_t c = 0; c < params.feature_weights.size(); ++c) {
        params.feature_weights[c] += config.learning_rate * grad_w[c] / batch;
      }
      for (size_t c = 0; c < params.cite_weights.size(); ++c) {
        params.cite_weights[c] += config.learning_rate * grad_cite[c] / batch;
      }
    }
    result.metrics.push_back(metrics);
  }

  // Final-policy evaluation over the whole task set.
  int eval_success = 0;
  int eval_total = 0;
  for (size_t i = 0; i < result.tasks.size(); ++i) {
    const int rollouts = std::max(2, config.env.eval_rollouts);
    const ScoredGroup scored = run_group(
        config, params, result.tasks[i], reward_graphs[i], lexicons[i], result.world,
        derive_seed(config.seed, kStreamEval + (i + 1) * 7919), rollouts);
    for (size_t g = 0; g < scored.group.members.size(); ++g) {
      EvalRecord rec;
      rec.trajectory = scored.group.members[g].trajectory;
      rec.series = scored.group.members[g].series;
      rec.outcome = scored.group.members[g].outcome;
      rec.advantages = scored.advantages[g];
      eval_success += rec.outcome.correctness;
      ++eval_total;
      result.eval.push_back(std::move(rec));
    }
  }
  result.final_success_rate =
      eval_total > 0 ? static_cast<double>(eval_success) / eval_total : 0.0;
  result.params = params;
  return result;
}

}  // namespace sapo
