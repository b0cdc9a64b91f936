#include "sapo/er_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "sapo/rng.hpp"
#include "sapo/text_norm.hpp"

namespace sapo {

int ErGraph::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(Err::UnknownNode, "no node '" + id + "' in graph '" + graph_id_ + "'");
  return it->second;
}

bool ErGraph::adjacent(int a, int b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

bool operator==(const ErGraph& a, const ErGraph& b) {
  return a.graph_id_ == b.graph_id_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_ &&
         a.answer_ == b.answer_;
}

void ErGraph::rebuild_derived() {
  index_.clear();
  for (int i = 0; i < node_count(); ++i) index_.emplace(nodes_[i].id, i);

  adjacency_.assign(nodes_.size(), {});
  for (const Edge& e : edges_) {
    adjacency_[e.src].push_back(e.dst);
    adjacency_[e.dst].push_back(e.src);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  // BFS from the answer; edges are undirected for distance.
  dist_.assign(nodes_.size(), Distance::unreachable());
  if (answer_ >= 0) {
    std::deque<int> queue{answer_};
    dist_[answer_] = Distance::of(0);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adjacency_[u]) {
        if (!dist_[v].reachable()) {
          dist_[v] = Distance::of(dist_[u].hops + 1);
          queue.push_back(v);
        }
      }
    }
  }
}

ErGraph build_graph(const std::vector<Triple>& triples, const std::string& answer_label,
                    const std::string& graph_id) {
  if (triples.empty()) throw Error(Err::EmptyGraph, "no triples for graph '" + graph_id + "'");

  ErGraph g;
  g.graph_id_ = graph_id;

  auto intern = [&g](const std::string& label) {
    const NodeId id = normalize_text(label);
    if (id.empty()) throw Error(Err::InvalidLabel, "entity label '" + label + "' normalizes to empty");
    auto it = g.index_.find(id);
    if (it != g.index_.end()) return it->second;
    const int idx = g.node_count();
    g.index_.emplace(id, idx);
    g.nodes_.push_back(EntityNode{id, label, {}});
    return idx;
  };

  std::set<std::tuple<int, int, std::string>> seen;
  for (const Triple& t : triples) {
    const int s = intern(t.subject);
    const int o = intern(t.object);
    if (s == o) continue;  // no self-loops
    if (!seen.emplace(s, o, t.relation).second) continue;  // duplicate triple
    g.edges_.push_back(ErGraph::Edge{s, o, t.relation});
  }

  const NodeId answer_id = normalize_text(answer_label);
  auto it = g.index_.find(answer_id);
  if (it == g.index_.end()) {
    throw Error(Err::AnswerNodeMissing,
                "answer '" + answer_label + "' is not an endpoint of any triple");
  }
  g.answer_ = it->second;
  g.rebuild_derived();
  return g;
}

ErGraph with_aliases(const ErGraph& graph,
                     const std::unordered_map<std::string, std::vector<std::string>>& aliases) {
  ErGraph g = graph;
  for (const auto& [label, alias_list] : aliases) {
    EntityNode& node = g.nodes_[g.index_of(normalize_text(label))];
    for (const std::string& alias : alias_list) {
      if (std::find(node.aliases.begin(), node.aliases.end(), alias) == node.aliases.end()) {
        node.aliases.push_back(alias);
      }
    }
  }
  return g;
}

Distance shortest_distance(const ErGraph& graph, const NodeId& node) {
  return graph.distance_to_answer(graph.index_of(node));
}

double contribution_score(Distance d, double k) {
  if (k < 1.0) throw Error(Err::InvalidDecay, "decay factor must be >= 1");
  if (!d.reachable()) return 0.0;
  return std::pow(k, -static_cast<double>(d.hops));
}

double contribution_score(const ErGraph& graph, const NodeId& node, double k) {
  return contribution_score(shortest_distance(graph, node), k);
}

const char* noise_mode_name(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::NodeDeletion: return "node_deletion";
    case NoiseMode::NoisyNodeInjection: return "noisy_node_injection";
    case NoiseMode::AnswerPerturbation: return "answer_perturbation";
  }
  return "unknown";
}

NoiseMode noise_mode_from_name(const std::string& name) {
  if (name == "node_deletion") return NoiseMode::NodeDeletion;
  if (name == "noisy_node_injection") return NoiseMode::NoisyNodeInjection;
  if (name == "answer_perturbation") return NoiseMode::AnswerPerturbation;
  throw Error(Err::InvalidConfig, "unknown noise mode '" + name + "'");
}

ErGraph corrupt_graph(const ErGraph& graph, const NoiseSpec& spec) {
  if (spec.rate < 0.0 || spec.rate > 1.0) {
    throw Error(Err::InvalidConfig, "noise rate must lie in [0, 1]");
  }
  Rng rng(spec.seed);
  ErGraph g = graph;

  switch (spec.mode) {
    case NoiseMode::NodeDeletion: {
      const size_t n = g.nodes_.size();
      size_t to_delete = static_cast<size_t>(std::floor(spec.rate * static_cast<double>(n)));
      to_delete = std::min(to_delete, n > 0 ? n - 1 : 0);  // the answer node survives
      if (to_delete == 0) return g;

      std::vector<int> candidates;
      for (int i = 0; i < g.node_count(); ++i) {
        if (i != g.answer_) candidates.push_back(i);
      }
      std::vector<size_t> picks = rng.sample_indices(candidates.size(), to_delete);
      std::vector<bool> drop(n, false);
      for (size_t p : picks) drop[candidates[p]] = true;

      std::vector<int> remap(n, -1);
      std::vector<EntityNode> kept;
      for (size_t i = 0; i < n; ++i) {
        if (!drop[i]) {
          remap[i] = static_cast<int>(kept.size());
          kept.push_back(g.nodes_[i]);
        }
      }
      std::vector<ErGraph::Edge> edges;
      for (const auto& e : g.edges_) {
        if (remap[e.src] >= 0 && remap[e.dst] >= 0) {
          edges.push_back(ErGraph::Edge{remap[e.src], remap[e.dst], e.relation});
        }
      }
      g.nodes_ = std::move(kept);
      g.edges_ = std::move(edges);
      g.answer_ = remap[g.answer_];
      break;
    }
    case NoiseMode::NoisyNodeInjection: {
      const size_t to_add = static_cast<size_t>(std::floor(spec.rate * static_cast<double>(g.nodes_.size())));
      uint64_t label_counter = 0;
      for (size_t i = 0; i < to_add; ++i) {
        std::string label;
        NodeId id;
        do {
          label = "injected noise node " + std::to_string(++label_counter);
          id = normalize_text(label);
        } while (g.index_.count(id) > 0);
        const int attach = static_cast<int>(rng.bounded(g.nodes_.size()));
        const int idx = g.node_count();
        g.index_.emplace(id, idx);
        g.nodes_.push_back(EntityNode{id, label, {}});
        g.edges_.push_back(ErGraph::Edge{attach, idx, "noise"});
      }
      break;
    }
    case NoiseMode::AnswerPerturbation: {
      if (rng.real01() < spec.rate && g.node_count() > 1) {
        int pick = static_cast<int>(rng.bounded(g.nodes_.size() - 1));
        if (pick >= g.answer_) ++pick;  // skip the current answer
        g.answer_ = pick;
      }
      break;
    }
  }

  g.rebuild_derived();
  return g;
}

namespace {

// All-pairs hop distances via BFS from each node. Task graphs are small.
std::vector<std::vector<int>> pairwise_distances(const ErGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::deque<int> queue{s};
    dist[s][s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : g.neighbors(u)) {
        if (dist[s][v] < 0) {
          dist[s][v] = dist[s][u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

}  // namespace

ValidationReport validate_task_graph(const ErGraph& graph,
                                     const std::vector<NodeId>& question_entities,
                                     const RetrievalOracle& oracle) {
  for (const NodeId& q : question_entities) {
    if (!graph.has_node(q)) {
      throw Error(Err::UnknownNode, "question entity '" + q + "' is not in the graph");
    }
  }

  ValidationReport report;
  std::set<NodeId> failing;

  std::vector<std::unordered_set<NodeId>> retrieved(graph.node_count());
  for (int i = 0; i < graph.node_count(); ++i) {
    retrieved[i] = oracle(graph.nodes()[i].id);
  }

  for (const auto& e : graph.edges()) {
    const NodeId& a = graph.nodes()[e.src].id;
    const NodeId& b = graph.nodes()[e.dst].id;
    if (!retrieved[e.src].count(b) || !retrieved[e.dst].count(a)) {
      report.connectivity_ok = false;
      failing.insert(a);
      failing.insert(b);
    }
  }

  const NodeId& answer = graph.answer_node();
  const auto pair_dist = pairwise_distances(graph);

  for (int u = 0; u < graph.node_count(); ++u) {
    const Distance du = graph.distance_to_answer(u);
    if (!du.reachable() || du.hops < 2) continue;

    if (retrieved[u].count(answer)) {
      report.distant_unreachability_ok = false;
      failing.insert(graph.nodes()[u].id);
    }

    // A node on one of u's shortest paths to the answer, two or more hops
    // ahead, must not be directly retrievable from u.
    for (int w = 0; w < graph.node_count(); ++w) {
      if (w == u || !graph.distance_to_answer(w).reachable()) continue;
      const int dw = graph.distance_to_answer(w).hops;
      if (dw > du.hops - 2) continue;
      if (pair_dist[u][w] < 0 || pair_dist[u][w] + dw != du.hops) continue;
      if (graph.adjacent(u, w)) continue;
      if (retrieved[u].count(graph.nodes()[w].id)) {
        report.intermediate_unskippability_ok = false;
        failing.insert(graph.nodes()[u].id);
      }
    }
  }

  report.failing_nodes.assign(failing.begin(), failing.end());
  return report;
}

}  // namespace sapo
