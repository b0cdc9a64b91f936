#include "sapo/analysis.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "sapo/json_io.hpp"

namespace sapo {

DistanceTable distance_table(const std::vector<ScoredTrajectory>& scored, int max_step) {
  struct Cell {
    double sum = 0.0;
    int count = 0;
    int unreachable = 0;
  };
  std::vector<Cell> correct(max_step + 1), incorrect(max_step + 1);

  for (const ScoredTrajectory& st : scored) {
    const std::vector<Distance> best = history_best_distance(st.series);
    const bool is_correct = st.outcome.scalar() == 1.0;
    const int limit = std::min<int>(max_step, static_cast<int>(best.size()));
    for (int t = 1; t <= limit; ++t) {
      Cell& cell = is_correct ? correct[t] : incorrect[t];
      if (best[t - 1].reachable()) {
        cell.sum += best[t - 1].hops;
        cell.count += 1;
      } else {
        cell.unreachable += 1;
      }
    }
  }

  DistanceTable table;
  for (int t = 1; t <= max_step; ++t) {
    if (correct[t].count + correct[t].unreachable + incorrect[t].count +
            incorrect[t].unreachable ==
        0) {
      continue;  // no trajectory alive at this step
    }
    DistanceRow row;
    row.step = t;
    row.correct_count = correct[t].count;
    row.correct_unreachable = correct[t].unreachable;
    row.incorrect_count = incorrect[t].count;
    row.incorrect_unreachable = incorrect[t].unreachable;
    if (correct[t].count > 0) row.correct_mean = correct[t].sum / correct[t].count;
    if (incorrect[t].count > 0) row.incorrect_mean = incorrect[t].sum / incorrect[t].count;
    if (row.correct_mean && row.incorrect_mean) {
      row.diff = *row.correct_mean - *row.incorrect_mean;
    }
    table.rows.push_back(row);
  }
  return table;
}

CorrelationResult gdcr_correctness_correlation(const std::vector<ScoredTrajectory>& scored) {
  if (scored.size() < 2) {
    throw Error(Err::DegenerateVariance, "correlation needs at least 2 trajectories");
  }
  std::vector<double> xs, ys;
  xs.reserve(scored.size());
  ys.reserve(scored.size());
  for (const ScoredTrajectory& st : scored) {
    xs.push_back(st.series.mean_r_g());
    ys.push_back(st.outcome.scalar());
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw Error(Err::DegenerateVariance, "constant mean GDCR or constant outcomes");
  }
  CorrelationResult result;
  result.r = sxy / std::sqrt(sxx * syy);
  result.n = static_cast<int>(xs.size());
  result.p_note =
      "point-biserial r over per-trajectory mean GDCR vs. correctness; sign is the tested "
      "output, no p-value computed";
  return result;
}

std::vector<CitedFractionBin> cited_fraction_by_distance(
    const std::vector<ScoredTrajectory>& scored) {
  std::map<int, CitedFractionBin> bins;
  for (const ScoredTrajectory& st : scored) {
    if (st.series.steps.empty()) continue;
    const StepReward& last = st.series.steps.back();
    for (const NodeId& id : last.retrieved_cumulative) {
      auto it = st.series.node_distances.find(id);
      if (it == st.series.node_distances.end() || !it->second.reachable()) continue;
      CitedFractionBin& bin = bins[it->second.hops];
      bin.distance = it->second.hops;
      bin.retrieved += 1;
      if (last.cited_cumulative.count(id)) bin.cited += 1;
    }
  }
  std::vector<CitedFractionBin> out;
  for (auto& [d, bin] : bins) {
    bin.fraction = bin.retrieved > 0 ? static_cast<double>(bin.cited) / bin.retrieved : 0.0;
    out.push_back(bin);
  }
  return out;
}

std::vector<ProgressBin> progress_curve(const std::vector<ScoredTrajectory>& scored, int bins) {
  if (bins < 1) throw Error(Err::InvalidSize, "progress_curve needs at least one bin");
  std::vector<double> sums(bins, 0.0);
  std::vector<int> counts(bins, 0);

  for (const ScoredTrajectory& st : scored) {
    const int total = static_cast<int>(st.series.steps.size());
    if (total == 0) continue;
    for (int t = 1; t <= total; ++t) {
      const auto& d = st.series.steps[t - 1].step_distance;
      if (!d || !d->reachable()) continue;
      int bin = static_cast<int>(static_cast<double>(t - 1) / total * bins);
      bin = std::min(bin, bins - 1);
      sums[bin] += d->hops;
      counts[bin] += 1;
    }
  }

  std::vector<ProgressBin> out;
  for (int b = 0; b < bins; ++b) {
    ProgressBin pb;
    pb.bin = b;
    pb.progress_lo = static_cast<double>(b) / bins;
    pb.progress_hi = static_cast<double>(b + 1) / bins;
    pb.count = counts[b];
    if (counts[b] > 0) pb.mean_distance = sums[b] / counts[b];
    out.push_back(pb);
  }
  return out;
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string distance_table_csv(const DistanceTable& table) {
  std::ostringstream out;
  out << "step,correct_mean,correct_count,correct_unreachable,incorrect_mean,incorrect_count,"
         "incorrect_unreachable,diff\n";
  for (const DistanceRow& row : table.rows) {
    out << row.step << ',' << opt_cell(row.correct_mean) << ',' << row.correct_count << ','
        << row.correct_unreachable << ',' << opt_cell(row.incorrect_mean) << ','
        << row.incorrect_count << ',' << row.incorrect_unreachable << ',' << opt_cell(row.diff)
        << '\n';
  }
  return out.str();
}

std::string progress_curve_csv(const std::vector<ProgressBin>& bins) {
  std::ostringstream out;
  out << "bin,progress_lo,progress_hi,mean_distance,count\n";
  for (const ProgressBin& b : bins) {
    out << b.bin << ',' << format_double(b.progress_lo) << ',' << format_double(b.progress_hi)
        << ',' << opt_cell(b.mean_distance) << ',' << b.count << '\n';
  }
  return out.str();
}

std::string cited_fraction_csv(const std::vector<CitedFractionBin>& bins) {
  std::ostringstream out;
  out << "distance,retrieved,cited,fraction\n";
  for (const CitedFractionBin& b : bins) {
    out << b.distance << ',' << b.retrieved << ',' << b.cited << ',' << format_double(b.fraction)
        << '\n';
  }
  return out.str();
}

}  // namespace sapo
