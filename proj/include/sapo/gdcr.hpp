#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sapo/entity_match.hpp"
#include "sapo/er_graph.hpp"
#include "sapo/trajectory.hpp"

namespace sapo {

/// Per-step reward decomposition. delta_cited holds entities cited for the
/// first time in this thought (after appearing in earlier observations);
/// delta_retrieved holds entities observed for the first time in this step.
struct StepReward {
  std::set<NodeId> cited_cumulative;      // T_t
  std::set<NodeId> retrieved_cumulative;  // O_t
  std::set<NodeId> delta_cited;           // T_t \ T_{t-1}
  std::set<NodeId> delta_retrieved;       // O_t \ O_{t-1}
  double r_cite = 0.0;
  double r_ret = 0.0;
  double r_g = 0.0;
  // Minimum answer distance over this step's delta entities; absent when both
  // deltas are empty, unreachable when none of them can reach the answer.
  std::optional<Distance> step_distance;
};

struct StepRewardSeries {
  std::string trajectory_id;
  std::string graph_id;
  std::vector<StepReward> steps;
  // Answer distance for every node that ever entered O or T. Kept for the
  // distance-bin analyses, which have no access to the graph.
  std::map<NodeId, Distance> node_distances;

  double total_r_g() const;
  double mean_r_g() const;
};

/// Two-stage scoring of one trajectory against its graph. Stage one links the
/// thought and credits newly-cited entities (those already retrieved, cited
/// for the first time); stage two links the observation and credits
/// newly-retrieved entities. Rewards are contribution scores k^{-d}.
StepRewardSeries score_trajectory(const Trajectory& traj, const ErGraph& graph,
                                  const Lexicon& lexicon, double k,
                                  const MatchOptions& options = {});

/// Prefix minimum of the defined step distances; steps before the first
/// defined distance carry unreachable.
std::vector<Distance> history_best_distance(const StepRewardSeries& series);

}  // namespace sapo
