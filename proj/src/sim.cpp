#include "sapo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "sapo/rng.hpp"
#include "sapo/text_norm.hpp"

namespace sapo {

int WorldGraph::edge_count() const {
  size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return static_cast<int>(twice / 2);
}

int WorldGraph::index_of_label(const std::string& label) const {
  auto it = index.find(normalize_text(label));
  return it == index.end() ? -1 : it->second;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

bool world_connected(const WorldGraph& w) {
  if (w.node_count == 0) return false;
  std::vector<bool> seen(w.node_count, false);
  std::deque<int> queue{0};
  seen[0] = true;
  int count = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : w.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == w.node_count;
}

}  // namespace

WorldGraph generate_world(int node_count, double mean_degree, uint64_t seed) {
  if (node_count < 10) throw Error(Err::InvalidSize, "world needs at least 10 nodes");
  if (mean_degree < 2.0) throw Error(Err::InvalidSize, "mean degree must be at least 2");
  if (mean_degree >= node_count) throw Error(Err::InvalidSize, "mean degree too large for node count");

  WorldGraph w;
  w.seed = seed;
  w.node_count = node_count;
  w.mean_degree = mean_degree;
  w.labels.reserve(node_count);
  for (int i = 0; i < node_count; ++i) {
    w.labels.push_back("entity " + std::to_string(i));
    w.index.emplace(normalize_text(w.labels.back()), i);
  }

  Rng rng(seed);
  std::vector<EdgeKey> edges;
  std::set<EdgeKey> edge_set;
  auto add_edge = [&](int a, int b) {
    const EdgeKey key = edge_key(a, b);
    if (a == b || edge_set.count(key)) return false;
    edge_set.insert(key);
    edges.push_back(key);
    return true;
  };

  // Ring lattice: each node linked to its floor(mean_degree/2) clockwise
  // successors, then extra random edges up to n * mean_degree / 2 total.
  const int k_half = static_cast<int>(mean_degree / 2.0);
  for (int j = 1; j <= k_half; ++j) {
    for (int i = 0; i < node_count; ++i) add_edge(i, (i + j) % node_count);
  }
  const size_t target_edges =
      static_cast<size_t>(std::llround(node_count * mean_degree / 2.0));
  size_t guard = 0;
  while (edges.size() < target_edges && guard++ < target_edges * 100) {
    add_edge(static_cast<int>(rng.bounded(node_count)), static_cast<int>(rng.bounded(node_count)));
  }

  // Watts-Strogatz style rewiring of the lattice edges.
  const double rewire_prob = 0.1;
  const size_t lattice_edges = std::min<size_t>(edges.size(), static_cast<size_t>(node_count) * k_half);
  for (size_t e = 0; e < lattice_edges; ++e) {
    if (rng.real01() >= rewire_prob) continue;
    const auto [u, v] = edges[e];
    for (int attempt = 0; attempt < 16; ++attempt) {
      const int w2 = static_cast<int>(rng.bounded(node_count));
      const EdgeKey key = edge_key(u, w2);
      if (w2 == u || w2 == v || edge_set.count(key)) continue;
      edge_set.erase(edges[e]);
      edge_set.insert(key);
      edges[e] = key;
      break;
    }
  }

  w.adjacency.assign(node_count, {});
  for (const auto& [a, b] : edges) {
    w.adjacency[a].push_back(b);
    w.adjacency[b].push_back(a);
  }
  for (auto& adj : w.adjacency) std::sort(adj.begin(), adj.end());
  w.connected = world_connected(w);
  return w;
}

RetrievalOracle world_adjacency_oracle(const WorldGraph& world) {
  return [&world](const NodeId& id) {
    std::unordered_set<NodeId> out;
    auto it = world.index.find(id);
    if (it == world.index.end()) return out;
    for (int v : world.adjacency[it->second]) out.insert(normalize_text(world.labels[v]));
    return out;
  };
}

TaskInstance synthesize_task(const WorldGraph& world, int walk_length, uint64_t seed,
                             int max_retries) {
  if (walk_length < 2) throw Error(Err::InvalidSize, "walk length must be at least 2");

  Rng rng(seed);
  const RetrievalOracle oracle = world_adjacency_oracle(world);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    const int start = static_cast<int>(rng.bounded(world.node_count));
    if (world.adjacency[start].empty()) continue;

    std::vector<Triple> triples;
    int cur = start;
    for (int step = 0; step < walk_length; ++step) {
      const auto& adj = world.adjacency[cur];
      if (adj.empty()) break;
      const int next = adj[rng.bounded(adj.size())];
      triples.push_back(Triple{world.labels[cur], "linked to", world.labels[next]});
      cur = next;
    }
    const int terminal = cur;
    if (terminal == start || triples.empty()) continue;

    TaskInstance task;
    task.task_id = "task-" + std::to_string(seed);
    task.gold_answer = world.labels[terminal];
    task.task_graph = build_graph(triples, task.gold_answer, task.task_id);
    task.answer_node = task.task_graph.answer_node();
    task.question_entities = {normalize_text(world.labels[start])};
    task.question_text = "Begin at '" + world.labels[start] +
                         "' and follow the chain of linked topics. Name the entity where the "
                         "chain of " +
                         std::to_string(walk_length) + " links ends.";

    try {
      const ValidationReport report =
          validate_task_graph(task.task_graph, task.question_entities, oracle);
      if (!report.all_ok()) continue;
    } catch (const Error&) {
      continue;
    }
    return task;
  }
  throw Error(Err::SynthesisExhausted,
              "no valid task after " + std::to_string(max_retries) + " attempts");
}

Observation search_tool(const WorldGraph& world, int query_entity, int top_k,
                        double distractor_rate, uint64_t seed) {
  if (query_entity < 0 || query_entity >= world.node_count) {
    throw Error(Err::UnknownNode, "query entity index out of range");
  }
  Rng rng(seed);
  Observation obs;
  obs.queried_entity = query_entity;

  const auto& neighbors = world.adjacency[query_entity];
  const size_t count = std::min<size_t>(top_k, neighbors.size());
  const std::vector<size_t> picks = rng.sample_indices(neighbors.size(), count);

  for (size_t p : picks) {
    int entity = neighbors[p];
    if (rng.real01() < distractor_rate) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const int candidate = static_cast<int>(rng.bounded(world.node_count));
        if (candidate == query_entity) continue;
        if (std::binary_search(neighbors.begin(), neighbors.end(), candidate)) continue;
        entity = candidate;
        break;
      }
    }
    const std::string& label = world.labels[entity];
    Snippet snip;
    snip.title = "About " + label;
    snip.body = "The page for " + label + " summarizes what is currently known about " + label + ".";
    snip.entity = entity;
    obs.snippets.push_back(std::move(snip));
  }
  return obs;
}

std::string render_observation(const WorldGraph& world, const Observation& obs) {
  std::string text = "A search for '" + world.labels[obs.queried_entity] + "' returned " +
                     std::to_string(obs.snippets.size()) + " results:";
  for (size_t i = 0; i < obs.snippets.size(); ++i) {
    text += " [" + std::to_string(i + 1) + "] " + obs.snippets[i].title + ": " +
            obs.snippets[i].body;
  }
  return text;
}

namespace {

struct RolloutState {
  std::vector<int> frontier;           // known entities, insertion order
  std::vector<bool> known;             // world index -> in frontier
  std::vector<bool> observed;          // appeared in some observation
  std::vector<bool> queried;
  std::vector<int> last_seen_step;     // -1 if never seen
  std::vector<int> observation_count;
  std::vector<bool> thought_mentioned;  // graph-linked entities already cited

  explicit RolloutState(int n)
      : known(n, false),
        observed(n, false),
        queried(n, false),
        last_seen_step(n, -1),
        observation_count(n, 0),
        thought_mentioned(n, false) {}

  void add_known(int e) {
    if (!known[e]) {
      known[e] = true;
      frontier.push_back(e);
    }
  }
};

FeatureMatrix frontier_features(const RolloutState& st, const std::vector<int>& candidates,
                                int step) {
  FeatureMatrix f = FeatureMatrix::zeros(static_cast<int>(candidates.size()), kFeatureCount);
  for (size_t i = 0; i < candidates.size(); ++i) {
    const int e = candidates[i];
    double* row = f.row(static_cast<int>(i));
    const int seen = st.last_seen_step[e] >= 0 ? st.last_seen_step[e] : 0;
    row[kFeatRecency] = 1.0 / (1.0 + static_cast<double>(step - 1 - seen));
    row[kFeatNovelty] = st.queried[e] ? 0.0 : 1.0;
    row[kFeatFrequency] = std::log1p(static_cast<double>(st.observation_count[e]));
    row[kFeatBias] = 1.0;
  }
  return f;
}

int sample_softmax(const std::vector<double>& logits, Rng& rng) {
  const std::vector<double> logprobs = log_softmax(logits);
  const double r = rng.real01();
  double cum = 0.0;
  for (size_t i = 0; i < logprobs.size(); ++i) {
    cum += std::exp(logprobs[i]);
    if (r < cum) return static_cast<int>(i);
  }
  return static_cast<int>(logprobs.size()) - 1;
}

}  // namespace

RolloutResult rollout(const PolicyParams& policy, const TaskInstance& task,
                      const WorldGraph& world, const RolloutConfig& config, uint64_t seed) {
  if (config.max_steps < 1) throw Error(Err::InvalidSize, "max_steps must be at least 1");

  Rng rng(derive_seed(seed, 1));
  RolloutResult result;
  result.trajectory.trajectory_id = task.task_id + "-r" + std::to_string(seed);
  result.trajectory.graph_id = task.task_graph.graph_id();
  result.trajectory.query = task.question_text;

  RolloutState st(world.node_count);
  for (const NodeId& q : task.question_entities) {
    auto it = world.index.find(q);
    if (it == world.index.end()) throw Error(Err::UnknownNode, "question entity not in world");
    st.add_known(it->second);
    st.last_seen_step[it->second] = 0;
  }
  const int answer_idx = world.index_of_label(task.gold_answer);

  std::vector<int> fresh_graph_entities;  // newly observed graph nodes, previous step

  for (int t = 1; t <= config.max_steps && !result.success; ++t) {
    Step step;

    // Thought. Templated mode cites every graph-linked entity fresh from the
    // previous observation; policy-cite mode lets the policy pick one.
    if (t == 1) {
      step.thought = "I need to work out: " + task.question_text;
    } else if (!config.policy_cite) {
      if (!fresh_graph_entities.empty()) {
        std::string names;
        for (size_t i = 0; i < fresh_graph_entities.size(); ++i) {
          if (i > 0) names += ", ";
          names += world.labels[fresh_graph_entities[i]];
        }
        step.thought = "The search results mention " + names + ". I will run another search.";
      } else {
        step.thought = "The last search added nothing I can use. I will run another search.";
      }
    } else {
      // Citation head: previously observed graph entities not yet mentioned,
      // plus a no-citation sentinel at index 0.
      std::vector<int> cite_candidates;
      for (int e : st.frontier) {
        if (st.observed[e] && !st.thought_mentioned[e] &&
            task.task_graph.has_node(normalize_text(world.labels[e]))) {
          cite_candidates.push_back(e);
        }
      }
      DecisionRecord cite;
      cite.step_index = t;
      cite.head = DecisionHead::Cite;
      cite.candidate_set.push_back("");  // sentinel: cite nothing
      cite.features = FeatureMatrix::zeros(static_cast<int>(cite_candidates.size()) + 1,
                                           kFeatureCount);
      const FeatureMatrix entity_rows = frontier_features(st, cite_candidates, t);
      for (size_t i = 0; i < cite_candidates.size(); ++i) {
        cite.candidate_set.push_back(normalize_text(world.labels[cite_candidates[i]]));
        for (int c = 0; c < kFeatureCount; ++c) {
          cite.features.row(static_cast<int>(i) + 1)[c] = entity_rows.row(static_cast<int>(i))[c];
        }
      }
      cite.logits_old = policy_logits(policy, cite.features, DecisionHead::Cite);
      cite.chosen_index = sample_softmax(cite.logits_old, rng);
      cite.logprob_old = log_softmax(cite.logits_old)[cite.chosen_index];
      if (cite.chosen_index == 0) {
        step.thought = "Nothing stands out yet. I will keep searching.";
      } else {
        const int e = cite_candidates[cite.chosen_index - 1];
        st.thought_mentioned[e] = true;
        step.thought =
            "The information about " + world.labels[e] + " stands out; I will build on it.";
      }
      result.decisions.push_back(std::move(cite));
    }

    // Query decision over the whole known frontier.
    DecisionRecord decision;
    decision.step_index = t;
    decision.head = DecisionHead::Query;
    decision.features = frontier_features(st, st.frontier, t);
    for (int e : st.frontier) decision.candidate_set.push_back(normalize_text(world.labels[e]));
    decision.logits_old = policy_logits(policy, decision.features, DecisionHead::Query);
    decision.chosen_index = sample_softmax(decision.logits_old, rng);
    decision.logprob_old = log_softmax(decision.logits_old)[decision.chosen_index];
    const int chosen = st.frontier[decision.chosen_index];
    result.decisions.push_back(std::move(decision));

    step.action.name = "search";
    step.action.arguments = {{"query", {world.labels[chosen]}}};
    st.queried[chosen] = true;

    const Observation obs =
        search_tool(world, chosen, config.top_k, config.distractor_rate, derive_seed(seed, 1000 + t));
    step.observation = render_observation(world, obs);

    // The rendered text mentions the queried entity (echo) and each snippet
    // entity; bookkeeping mirrors the text exactly.
    std::vector<int> mentioned{chosen};
    for (const Snippet& s : obs.snippets) mentioned.push_back(s.entity);
    fresh_graph_entities.clear();
    bool answer_seen = false;
    for (int e : mentioned) {
      if (!st.observed[e]) {
        st.observed[e] = true;
        if (task.task_graph.has_node(normalize_text(world.labels[e]))) {
          fresh_graph_entities.push_back(e);
        }
        if (e == answer_idx) answer_seen = true;
      }
      st.add_known(e);
      st.last_seen_step[e] = t;
      st.observation_count[e] += 1;
    }

    result.trajectory.steps.push_back(std::move(step));
    if (answer_seen) {
      result.success = true;
      result.trajectory.final_answer = task.gold_answer;
    }
  }

  if (!result.success) result.trajectory.final_answer = "unknown";
  return result;
}

RolloutResult rollout_oracle_greedy(const TaskInstance& task, const WorldGraph& world,
                                    const RolloutConfig& config, uint64_t seed) {
  // World-graph BFS distances to the answer (the oracle is allowed to know).
  const int answer_idx = world.index_of_label(task.gold_answer);
  std::vector<int> dist(world.node_count, -1);
  std::deque<int> queue{answer_idx};
  dist[answer_idx] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : world.adjacency[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }

  RolloutResult result;
  result.trajectory.trajectory_id = task.task_id + "-oracle";
  result.trajectory.graph_id = task.task_graph.graph_id();
  result.trajectory.query = task.question_text;

  RolloutState st(world.node_count);
  for (const NodeId& q : task.question_entities) {
    st.add_known(world.index.at(q));
    st.last_seen_step[world.index.at(q)] = 0;
  }

  std::vector<int> fresh_graph_entities;
  for (int t = 1; t <= config.max_steps && !result.success; ++t) {
    Step step;
    if (t == 1) {
      step.thought = "I need to work out: " + task.question_text;
    } else if (!fresh_graph_entities.empty()) {
      std::string names;
      for (size_t i = 0; i < fresh_graph_entities.size(); ++i) {
        if (i > 0) names += ", ";
        names += world.labels[fresh_graph_entities[i]];
      }
      step.thought = "The search results mention " + names + ". I will run another search.";
    } else {
      step.thought = "The last search added nothing I can use. I will run another search.";
    }

    int chosen = st.frontier[0];
    for (int e : st.frontier) {
      const bool better = dist[e] >= 0 && (dist[chosen] < 0 || dist[e] < dist[chosen]);
      if (better) chosen = e;
    }
    step.action.name = "search";
    step.action.arguments = {{"query", {world.labels[chosen]}}};
    st.queried[chosen] = true;

    const Observation obs =
        search_tool(world, chosen, config.top_k, config.distractor_rate, derive_seed(seed, 1000 + t));
    step.observation = render_observation(world, obs);

    std::vector<int> mentioned{chosen};
    for (const Snippet& s : obs.snippets) mentioned.push_back(s.entity);
    fresh_graph_entities.clear();
    bool answer_seen = false;
    for (int e : mentioned) {
      if (!st.observed[e]) {
        st.observed[e] = true;
        if (task.task_graph.has_node(normalize_text(world.labels[e]))) {
          fresh_graph_entities.push_back(e);
        }
        if (e == answer_idx) answer_seen = true;
      }
      st.add_known(e);
      st.last_seen_step[e] = t;
      st.observation_count[e] += 1;
    }

    result.trajectory.steps.push_back(std::move(step));
    if (answer_seen) {
      result.success = true;
      result.trajectory.final_answer = task.gold_answer;
    }
  }
  if (!result.success) result.trajectory.final_answer = "unknown";
  return result;
}

}  // namespace sapo
