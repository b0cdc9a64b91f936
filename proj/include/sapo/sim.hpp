#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sapo/er_graph.hpp"
#include "sapo/policy.hpp"
#include "sapo/trajectory.hpp"

namespace sapo {

// Latent world graph stand-in: a seeded small-world graph (ring lattice plus
// rewiring) with unique synthetic entity labels.
struct WorldGraph {
  uint64_t seed = 0;
  int node_count = 0;
  double mean_degree = 0.0;
  bool connected = false;
  std::vector<std::string> labels;
  std::vector<std::vector<int>> adjacency;  // sorted, undirected
  std::unordered_map<std::string, int> index;  // normalized label -> node

  int edge_count() const;
  int index_of_label(const std::string& label) const;  // -1 if absent
};

WorldGraph generate_world(int node_count, double mean_degree, uint64_t seed);

// Retrieval oracle over world adjacency, keyed by normalized labels.
RetrievalOracle world_adjacency_oracle(const WorldGraph& world);

struct TaskInstance {
  std::string task_id;
  std::vector<NodeId> question_entities;
  NodeId answer_node;
  ErGraph task_graph;
  std::string question_text;
  std::string gold_answer;  // world label of the answer node
};

// Random-walk task synthesis with rejection sampling against the structural
// checks (world-adjacency oracle). Throws SynthesisExhausted after
// max_retries failed attempts.
TaskInstance synthesize_task(const WorldGraph& world, int walk_length, uint64_t seed,
                             int max_retries = 50);

struct Snippet {
  std::string title;
  std::string body;
  int entity = -1;  // world node the snippet mentions
};

struct Observation {
  int queried_entity = -1;
  std::vector<Snippet> snippets;
};

// Simulated search: up to top_k seeded-sampled neighbors of the queried
// entity, each independently replaced by a non-neighbor distractor with
// probability distractor_rate.
Observation search_tool(const WorldGraph& world, int query_entity, int top_k,
                        double distractor_rate, uint64_t seed);

std::string render_observation(const WorldGraph& world, const Observation& obs);

struct RolloutConfig {
  int max_steps = 20;
  int top_k = 5;
  double distractor_rate = 0.0;
  bool policy_cite = false;  // citation chosen by the policy instead of templated
};

struct RolloutResult {
  Trajectory trajectory;
  std::vector<DecisionRecord> decisions;
  bool success = false;
};

// Thought-action-observation loop. The policy picks a query entity from the
// known frontier each step; the episode succeeds as soon as the answer node
// appears in an observation, at which point the gold label is emitted.
RolloutResult rollout(const PolicyParams& policy, const TaskInstance& task,
                      const WorldGraph& world, const RolloutConfig& config, uint64_t seed);

// Deterministic reference policy: always queries the frontier node nearest
// the answer (by world distance). Used by tests and diagnostics.
RolloutResult rollout_oracle_greedy(const TaskInstance& task, const WorldGraph& world,
                                    const RolloutConfig& config, uint64_t seed);

}  // namespace sapo
