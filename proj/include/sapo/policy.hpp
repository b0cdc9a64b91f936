#pragma once

#include <string>
#include <vector>

#include "sapo/advantage.hpp"
#include "sapo/er_graph.hpp"

namespace sapo {

// Candidate features for the softmax search policy, fixed per run.
enum Feature : int {
  kFeatRecency = 0,    // 1 / (1 + steps since the entity last appeared)
  kFeatNovelty = 1,    // 1 if the entity has not been queried yet
  kFeatFrequency = 2,  // log(1 + observations containing the entity)
  kFeatBias = 3,
  kFeatureCount = 4,
};

const char* feature_name(int index);

// Row-major matrix, one row per candidate.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  static FeatureMatrix zeros(int rows, int cols) {
    return FeatureMatrix{rows, cols, std::vector<double>(static_cast<size_t>(rows) * cols, 0.0)};
  }
  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
};

struct PolicyParams {
  std::vector<double> feature_weights = std::vector<double>(kFeatureCount, 0.0);
  // Second head for the optional policy-controlled citation decision.
  std::vector<double> cite_weights = std::vector<double>(kFeatureCount, 0.0);
  double temperature = 1.0;
};

enum class DecisionHead { Query, Cite };

// One importance-ratio unit: a single softmax choice made during a rollout,
// with enough context to re-evaluate it under new parameters.
struct DecisionRecord {
  int step_index = 1;  // 1-based step the decision belongs to
  DecisionHead head = DecisionHead::Query;
  std::vector<NodeId> candidate_set;
  FeatureMatrix features;
  int chosen_index = 0;
  std::vector<double> logits_old;
  double logprob_old = 0.0;
};

struct ClipConfig {
  double eps_low = 0.2;
  double eps_high = 0.28;
};

std::vector<double> policy_logits(const PolicyParams& params, const FeatureMatrix& features,
                                  DecisionHead head);
std::vector<double> log_softmax(const std::vector<double>& logits);

double decision_logprob(const PolicyParams& params, const FeatureMatrix& features,
                        DecisionHead head, int chosen_index);
double decision_logprob(const PolicyParams& params, const DecisionRecord& record);

// exp(logprob_new - logprob_old).
double importance_ratio(const PolicyParams& params_new, const DecisionRecord& record);

struct GroupMember {
  Trajectory trajectory;
  StepRewardSeries series;
  OutcomeReward outcome;
  std::vector<DecisionRecord> decisions;
};

struct TrajectoryGroup {
  std::string query_id;
  std::vector<GroupMember> members;
};

// Clipped surrogate: mean over trajectories of the per-decision mean of
// min(rho*A, clip(rho, 1-eps_low, 1+eps_high)*A), where A is the combined
// advantage of the decision's step.
double surrogate_objective(const TrajectoryGroup& group,
                           const std::vector<AdvantageTensor>& advantages,
                           const PolicyParams& params, const ClipConfig& clip);

struct PolicyGradient {
  std::vector<double> d_feature_weights;
  std::vector<double> d_cite_weights;
  double d_temperature = 0.0;
};

// Exact gradient of the surrogate under the convention that ties between the
// clipped and unclipped branch select the unclipped one.
PolicyGradient objective_gradient(const TrajectoryGroup& group,
                                  const std::vector<AdvantageTensor>& advantages,
                                  const PolicyParams& params, const ClipConfig& clip);

}  // namespace sapo
