#include "sapo/gdcr.hpp"

namespace sapo {

double StepRewardSeries::total_r_g() const {
  double sum = 0.0;
  for (const StepReward& s : steps) sum += s.r_g;
  return sum;
}

double StepRewardSeries::mean_r_g() const {
  return steps.empty() ? 0.0 : total_r_g() / static_cast<double>(steps.size());
}

StepRewardSeries score_trajectory(const Trajectory& traj, const ErGraph& graph,
                                  const Lexicon& lexicon, double k,
                                  const MatchOptions& options) {
  if (k < 1.0) throw Error(Err::InvalidDecay, "decay factor must be >= 1");
  if (traj.steps.empty()) {
    throw Error(Err::EmptyTrajectory, "trajectory '" + traj.trajectory_id + "' has no steps");
  }
  for (const auto& [surface, node] : lexicon.entries) {
    if (!graph.has_node(node)) {
      throw Error(Err::LexiconGraphMismatch,
                  "lexicon node '" + node + "' is not in graph '" + graph.graph_id() + "'");
    }
  }

  StepRewardSeries series;
  series.trajectory_id = traj.trajectory_id;
  series.graph_id = graph.graph_id();

  std::set<NodeId> cited;      // T_{t-1}
  std::set<NodeId> retrieved;  // O_{t-1}

  auto note_distance = [&](const NodeId& id) {
    series.node_distances.emplace(id, shortest_distance(graph, id));
  };

  for (const Step& step : traj.steps) {
    StepReward r;

    // Thought stage: only entities already retrieved are citable, and each
    // earns credit once.
    const MentionSet thought_mentions = link_entities(step.thought, lexicon, options);
    Distance best = Distance::unreachable();
    bool any_delta = false;
    for (const NodeId& id : thought_mentions.node_ids) {
      if (!retrieved.count(id) || cited.count(id)) continue;
      r.delta_cited.insert(id);
      cited.insert(id);
      note_distance(id);
      r.r_cite += contribution_score(graph, id, k);
      best = Distance::min(best, shortest_distance(graph, id));
      any_delta = true;
    }

    // Observation stage.
    const MentionSet obs_mentions = link_entities(step.observation, lexicon, options);
    for (const NodeId& id : obs_mentions.node_ids) {
      if (retrieved.count(id)) continue;
      r.delta_retrieved.insert(id);
      retrieved.insert(id);
      note_distance(id);
      r.r_ret += contribution_score(graph, id, k);
      best = Distance::min(best, shortest_distance(graph, id));
      any_delta = true;
    }

    r.r_g = r.r_cite + r.r_ret;
    if (any_delta) r.step_distance = best;
    r.cited_cumulative = cited;
    r.retrieved_cumulative = retrieved;
    series.steps.push_back(std::move(r));
  }
  return series;
}

std::vector<Distance> history_best_distance(const StepRewardSeries& series) {
  std::vector<Distance> best;
  best.reserve(series.steps.size());
  Distance running = Distance::unreachable();
  for (const StepReward& s : series.steps) {
    if (s.step_distance) running = Distance::min(running, *s.step_distance);
    best.push_back(running);
  }
  return best;
}

}  // namespace sapo
