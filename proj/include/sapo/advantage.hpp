#pragma once

#include <string>
#include <vector>

#include "sapo/gdcr.hpp"
#include "sapo/trajectory.hpp"

namespace sapo {

struct OutcomeReward {
  int correctness = 0;   // 0 or 1
  int format_valid = 0;  // 0 or 1

  double scalar() const { return static_cast<double>(correctness * format_valid); }
};

/// Simulation judge: correct iff the normalized final answer equals the
/// normalized gold answer or one of its aliases. A missing final answer is a
/// format failure.
OutcomeReward outcome_reward(const Trajectory& traj, const std::string& gold_answer,
                             const std::vector<std::string>& gold_aliases = {});

constexpr double kDefaultNormEps = 1e-6;

/// Group-normalized outcome advantages: (R_i - mean) / (pop_std + eps).
/// Requires at least two members.
std::vector<double> group_outcome_advantages(const std::vector<double>& rewards,
                                             double eps = kDefaultNormEps);

/// Within-trajectory normalization of the GDCR series, clipped to [-1, 1].
std::vector<double> step_advantages(const std::vector<double>& r_g,
                                    double eps = kDefaultNormEps);

/// A_t = outcome_adv + lambda * |outcome_adv| * step_adv_t. lambda = 0
/// returns outcome_adv bit-for-bit.
std::vector<double> combine_advantages(double outcome_adv, const std::vector<double>& step_adv,
                                       double lambda);

struct AdvantageTensor {
  double outcome_advantage = 0.0;
  std::vector<double> step_advantage;  // per step, in [-1, 1]
  std::vector<double> combined;        // per step
};

/// Full per-group pipeline: normalize outcomes across the group, normalize
/// each member's GDCR series, combine with weight lambda.
std::vector<AdvantageTensor> build_advantages(const std::vector<StepRewardSeries>& series,
                                              const std::vector<OutcomeReward>& outcomes,
                                              double lambda, double eps = kDefaultNormEps);

}  // namespace sapo
