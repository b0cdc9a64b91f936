#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sapo/error.hpp"

namespace sapo {

// Node identity is the normalized canonical label: two triples mentioning the
// same normalized string share a node.
using NodeId = std::string;

struct EntityNode {
  NodeId id;
  std::string canonical_label;
  std::vector<std::string> aliases;

  friend bool operator==(const EntityNode&, const EntityNode&) = default;
};

// Hop count to the answer node, or unreachable. Unreachable compares as +inf.
struct Distance {
  int hops = -1;

  bool reachable() const { return hops >= 0; }
  static Distance unreachable() { return {}; }
  static Distance of(int h) { return Distance{h}; }

  friend bool operator==(const Distance&, const Distance&) = default;

  static Distance min(Distance a, Distance b) {
    if (!a.reachable()) return b;
    if (!b.reachable()) return a;
    return a.hops <= b.hops ? a : b;
  }
};

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;
};

struct NoiseSpec;

// Entity-relation graph for one query, with a designated answer node.
// Immutable after construction; distances to the answer are precomputed.
class ErGraph {
 public:
  struct Edge {
    int src = 0;
    int dst = 0;
    std::string relation;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  ErGraph() = default;

  const std::string& graph_id() const { return graph_id_; }
  const std::vector<EntityNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  bool has_node(const NodeId& id) const { return index_.count(id) > 0; }
  int index_of(const NodeId& id) const;
  const EntityNode& node(const NodeId& id) const { return nodes_[index_of(id)]; }
  const NodeId& answer_node() const { return nodes_[answer_].id; }
  int answer_index() const { return answer_; }

  // Undirected, deduplicated adjacency (indices).
  const std::vector<int>& neighbors(int index) const { return adjacency_[index]; }
  bool adjacent(int a, int b) const;

  Distance distance_to_answer(int index) const { return dist_[index]; }

  friend bool operator==(const ErGraph&, const ErGraph&);

 private:
  friend ErGraph build_graph(const std::vector<Triple>&, const std::string&, const std::string&);
  friend ErGraph with_aliases(const ErGraph&,
                              const std::unordered_map<std::string, std::vector<std::string>>&);
  friend ErGraph corrupt_graph(const ErGraph&, const NoiseSpec&);

  void rebuild_derived();

  std::string graph_id_;
  std::vector<EntityNode> nodes_;
  std::vector<Edge> edges_;
  int answer_ = -1;
  std::unordered_map<NodeId, int> index_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Distance> dist_;
};

// One node per distinct normalized label, one edge per deduplicated triple.
// Self-loops (subject == object after normalization) are dropped. The answer
// node is the node whose normalized label equals the normalized answer_label.
ErGraph build_graph(const std::vector<Triple>& triples, const std::string& answer_label,
                    const std::string& graph_id = "");

// Copy of `graph` with per-node alias lists attached; keys are labels (or
// node ids) resolved through normalization.
ErGraph with_aliases(const ErGraph& graph,
                     const std::unordered_map<std::string, std::vector<std::string>>& aliases);

// BFS hop count from `node` to the answer node over undirected edges.
Distance shortest_distance(const ErGraph& graph, const NodeId& node);

// k^{-d}; 0 when the node cannot reach the answer. Requires k >= 1.
double contribution_score(const ErGraph& graph, const NodeId& node, double k);
double contribution_score(Distance d, double k);

enum class NoiseMode { NodeDeletion, NoisyNodeInjection, AnswerPerturbation };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::NodeDeletion;
  double rate = 0.0;  // fraction in [0, 1]
  uint64_t seed = 0;
};

const char* noise_mode_name(NoiseMode mode);
NoiseMode noise_mode_from_name(const std::string& name);

// Seeded corruption. node_deletion removes floor(rate*|nodes|) non-answer
// nodes; noisy_node_injection adds floor(rate*|nodes|) leaf nodes; answer
// perturbation reassigns the answer with probability `rate`.
ErGraph corrupt_graph(const ErGraph& graph, const NoiseSpec& spec);

struct ValidationReport {
  bool connectivity_ok = true;
  bool distant_unreachability_ok = true;
  bool intermediate_unskippability_ok = true;
  std::vector<NodeId> failing_nodes;

  bool all_ok() const {
    return connectivity_ok && distant_unreachability_ok && intermediate_unskippability_ok;
  }
};

// Maps a node to the set of nodes retrievable by querying it (in simulation:
// its world-graph neighbors).
using RetrievalOracle = std::function<std::unordered_set<NodeId>(const NodeId&)>;

// Structural checks on a task graph:
//  - connectivity: both endpoints of every edge retrieve each other;
//  - distant unreachability: no node at distance >= 2 retrieves the answer;
//  - intermediate unskippability: no node retrieves a non-adjacent node that
//    lies on one of its shortest paths to the answer.
ValidationReport validate_task_graph(const ErGraph& graph,
                                     const std::vector<NodeId>& question_entities,
                                     const RetrievalOracle& oracle);

}  // namespace sapo
