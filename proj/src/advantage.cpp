#include "sapo/advantage.hpp"

#include <algorithm>
#include <cmath>

#include "sapo/text_norm.hpp"

namespace sapo {

OutcomeReward outcome_reward(const Trajectory& traj, const std::string& gold_answer,
                             const std::vector<std::string>& gold_aliases) {
  OutcomeReward r;
  if (!traj.final_answer) return r;  // no answer block: format failure
  r.format_valid = 1;

  const std::string answer = normalize_text(*traj.final_answer);
  if (answer == normalize_text(gold_answer)) {
    r.correctness = 1;
    return r;
  }
  for (const std::string& alias : gold_aliases) {
    if (answer == normalize_text(alias)) {
      r.correctness = 1;
      return r;
    }
  }
  return r;
}

namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / n);
  return m;
}

double clamp_finite(double x) {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, -1e100, 1e100);
}

}  // namespace

std::vector<double> group_outcome_advantages(const std::vector<double>& rewards, double eps) {
  if (rewards.size() < 2) {
    throw Error(Err::GroupTooSmall, "group normalization needs at least 2 rewards");
  }
  const Moments m = moments(rewards);
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - m.mean) / (m.std + eps));
  return out;
}

std::vector<double> step_advantages(const std::vector<double>& r_g, double eps) {
  std::vector<double> xs;
  xs.reserve(r_g.size());
  for (double x : r_g) xs.push_back(clamp_finite(x));
  if (xs.empty()) return {};
  const Moments m = moments(xs);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(std::clamp((x - m.mean) / (m.std + eps), -1.0, 1.0));
  return out;
}

std::vector<double> combine_advantages(double outcome_adv, const std::vector<double>& step_adv,
                                       double lambda) {
  std::vector<double> out;
  out.reserve(step_adv.size());
  if (lambda == 0.0) {
    out.assign(step_adv.size(), outcome_adv);
    return out;
  }
  const double scale = lambda * std::abs(outcome_adv);
  for (double a : step_adv) out.push_back(outcome_adv + scale * a);
  return out;
}

std::vector<AdvantageTensor> build_advantages(const std::vector<StepRewardSeries>& series,
                                              const std::vector<OutcomeReward>& outcomes,
                                              double lambda, double eps) {
  if (series.size() != outcomes.size()) {
    throw Error(Err::InvalidConfig, "series/outcome count mismatch");
  }
  std::vector<double> rewards;
  rewards.reserve(outcomes.size());
  for (const OutcomeReward& o : outcomes) rewards.push_back(o.scalar());
  const std::vector<double> outcome_adv = group_outcome_advantages(rewards, eps);

  std::vector<AdvantageTensor> tensors;
  tensors.reserve(series.size());
  for (size_t i = 0; i < series.size(); ++i) {
    AdvantageTensor t;
    t.outcome_advantage = outcome_adv[i];
    std::vector<double> r_g;
    r_g.reserve(series[i].steps.size());
    for (const StepReward& s : series[i].steps) r_g.push_back(s.r_g);
    t.step_advantage = step_advantages(r_g, eps);
    t.combined = combine_advantages(t.outcome_advantage, t.step_advantage, lambda);
    tensors.push_back(std::move(t));
  }
  return tensors;
}

}  // namespace sapo
