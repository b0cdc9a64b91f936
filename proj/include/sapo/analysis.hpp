#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sapo/advantage.hpp"
#include "sapo/gdcr.hpp"

namespace sapo {

struct ScoredTrajectory {
  StepRewardSeries series;
  OutcomeReward outcome;
};

struct DistanceRow {
  int step = 0;
  std::optional<double> correct_mean;
  int correct_count = 0;
  int correct_unreachable = 0;
  std::optional<double> incorrect_mean;
  int incorrect_count = 0;
  int incorrect_unreachable = 0;
  std::optional<double> diff;  // correct - incorrect, when both present
};

struct DistanceTable {
  std::vector<DistanceRow> rows;
};

// Mean history-best distance per step index, split by outcome correctness.
// Unreachable entries are excluded from means and counted separately.
DistanceTable distance_table(const std::vector<ScoredTrajectory>& scored, int max_step);

struct CorrelationResult {
  double r = 0.0;
  int n = 0;
  std::string p_note;
};

// Point-biserial correlation between per-trajectory mean GDCR and outcome
// correctness. Throws DegenerateVariance when either variable is constant.
CorrelationResult gdcr_correctness_correlation(const std::vector<ScoredTrajectory>& scored);

struct CitedFractionBin {
  int distance = 0;
  int retrieved = 0;
  int cited = 0;
  double fraction = 0.0;
};

// Of the retrieved entities at each answer distance, the fraction that was
// ever explicitly cited.
std::vector<CitedFractionBin> cited_fraction_by_distance(
    const std::vector<ScoredTrajectory>& scored);

struct ProgressBin {
  int bin = 0;
  double progress_lo = 0.0;
  double progress_hi = 0.0;
  std::optional<double> mean_distance;
  int count = 0;
};

// Step distances binned by normalized progress t / T.
std::vector<ProgressBin> progress_curve(const std::vector<ScoredTrajectory>& scored, int bins);

std::string distance_table_csv(const DistanceTable& table);
std::string progress_curve_csv(const std::vector<ProgressBin>& bins);
std::string cited_fraction_csv(const std::vector<CitedFractionBin>& bins);

}  // namespace sapo
