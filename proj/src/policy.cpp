#include "sapo/policy.hpp"

#include <algorithm>
#include <cmath>

namespace sapo {

const char* feature_name(int index) {
  switch (index) {
    case kFeatRecency: return "recency";
    case kFeatNovelty: return "novelty";
    case kFeatFrequency: return "frequency";
    case kFeatBias: return "bias";
  }
  return "unknown";
}

std::vector<double> policy_logits(const PolicyParams& params, const FeatureMatrix& features,
                                  DecisionHead head) {
  const std::vector<double>& w =
      head == DecisionHead::Query ? params.feature_weights : params.cite_weights;
  if (features.cols != static_cast<int>(w.size())) {
    throw Error(Err::InvalidConfig, "feature width does not match weight vector");
  }
  std::vector<double> logits(features.rows, 0.0);
  for (int r = 0; r < features.rows; ++r) {
    double dot = 0.0;
    const double* row = features.row(r);
    for (int c = 0; c < features.cols; ++c) dot += row[c] * w[c];
    logits[r] = dot / params.temperature;
  }
  return logits;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  const double lse = peak + std::log(sum);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

double decision_logprob(const PolicyParams& params, const FeatureMatrix& features,
                        DecisionHead head, int chosen_index) {
  if (features.rows == 0) throw Error(Err::EmptyCandidateSet, "decision has no candidates");
  if (chosen_index < 0 || chosen_index >= features.rows) {
    throw Error(Err::InvalidConfig, "chosen index out of range");
  }
  return log_softmax(policy_logits(params, features, head))[chosen_index];
}

double decision_logprob(const PolicyParams& params, const DecisionRecord& record) {
  return decision_logprob(params, record.features, record.head, record.chosen_index);
}

double importance_ratio(const PolicyParams& params_new, const DecisionRecord& record) {
  return std::exp(decision_logprob(params_new, record) - record.logprob_old);
}

namespace {

double advantage_for(const std::vector<AdvantageTensor>& advantages, size_t member,
                     const DecisionRecord& record) {
  const auto& combined = advantages[member].combined;
  const int t = record.step_index;
  if (t < 1 || t > static_cast<int>(combined.size())) {
    throw Error(Err::MissingAdvantage,
                "no advantage for step " + std::to_string(t) + " of member " +
                    std::to_string(member));
  }
  return combined[t - 1];
}

}  // namespace

double surrogate_objective(const TrajectoryGroup& group,
                           const std::vector<AdvantageTensor>& advantages,
                           const PolicyParams& params, const ClipConfig& clip) {
  if (advantages.size() != group.members.size()) {
    throw Error(Err::MissingAdvantage, "advantage tensor count does not match group size");
  }
  const double g = static_cast<double>(group.members.size());
  double total = 0.0;
  for (size_t i = 0; i < group.members.size(); ++i) {
    const auto& decisions = group.members[i].decisions;
    if (decisions.empty()) continue;
    double member_sum = 0.0;
    for (const DecisionRecord& d : decisions) {
      const double a = advantage_for(advantages, i, d);
      const double rho = importance_ratio(params, d);
      const double clipped = std::clamp(rho, 1.0 - clip.eps_low, 1.0 + clip.eps_high);
      member_sum += std::min(rho * a, clipped * a);
    }
    total += member_sum / static_cast<double>(decisions.size());
  }
  return total / g;
}

PolicyGradient objective_gradient(const TrajectoryGroup& group,
                                  const std::vector<AdvantageTensor>& advantages,
                                  const PolicyParams& params, const ClipConfig& clip) {
  if (advantages.size() != group.members.size()) {
    throw Error(Err::MissingAdvantage, "advantage tensor count does not match group size");
  }
  PolicyGradient grad;
  grad.d_feature_weights.assign(params.feature_weights.size(), 0.0);
  grad.d_cite_weights.assign(params.cite_weights.size(), 0.0);

  const double g = static_cast<double>(group.members.size());
  for (size_t i = 0; i < group.members.size(); ++i) {
    const auto& decisions = group.members[i].decisions;
    if (decisions.empty()) continue;
    const double member_weight = 1.0 / (g * static_cast<double>(decisions.size()));

    for (const DecisionRecord& d : decisions) {
      const double a = advantage_for(advantages, i, d);
      if (a == 0.0) continue;

      const std::vector<double> logits = policy_logits(params, d.features, d.head);
      const std::vector<double> logprobs = log_softmax(logits);
      const double rho = std::exp(logprobs[d.chosen_index] - d.logprob_old);
      const double clipped = std::clamp(rho, 1.0 - clip.eps_low, 1.0 + clip.eps_high);
      // Ties select the unclipped branch; the clipped branch has zero
      // gradient outside the clip interval and the same gradient inside it.
      if (rho * a > clipped * a) continue;

      std::vector<double> probs(logits.size());
      for (size_t m = 0; m < logits.size(); ++m) probs[m] = std::exp(logprobs[m]);

      // d logpi / d w = (f_chosen - E_p[f]) / tau
      // d logpi / d tau = (E_p[z] - z_chosen) / tau
      const double coeff = member_weight * a * rho;
      std::vector<double>& dw =
          d.head == DecisionHead::Query ? grad.d_feature_weights : grad.d_cite_weights;
      const double* chosen_row = d.features.row(d.chosen_index);
      double z_mean = 0.0;
      for (size_t m = 0; m < logits.size(); ++m) z_mean += probs[m] * logits[m];
      for (int c = 0; c < d.features.cols; ++c) {
        double f_mean = 0.0;
        for (int m = 0; m < d.features.rows; ++m) f_mean += probs[m] * d.features.row(m)[c];
        dw[c] += coeff * (chosen_row[c] - f_mean) / params.temperature;
      }
      grad.d_temperature += coeff * (z_mean - logits[d.chosen_index]) / params.temperature;
    }
  }
  return grad;
}

}  // namespace sapo
