#include "dracc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dracc/error.hpp"

namespace dracc {

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::NoData, "median of empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

MetricsRow summarize(std::span<const double> estimates, std::span<const Interval> intervals, double theta_star) {
  if (estimates.empty()) throw Error(ErrorCode::NoData, "no estimates to summarize");
  if (!intervals.empty() && intervals.size() != estimates.size()) {
    throw Error(ErrorCode::DimensionMismatch, "estimates and intervals differ in count");
  }
  const double m = static_cast<double>(estimates.size());
  double sum = 0.0, sq = 0.0;
  std::vector<double> abs_err;
  abs_err.reserve(estimates.size());
  for (double e : estimates) {
    const double d = e - theta_star;
    sum += d;
    sq += d * d;
    abs_err.push_back(std::abs(d));
  }
  MetricsRow row;
  row.count = estimates.size();
  row.bias = sum / m;
  row.rmse = std::sqrt(sq / m);
  row.mae = median(std::move(abs_err));
  if (!intervals.empty()) {
    std::size_t covered = 0;
    double width = 0.0;
    for (const auto& iv : intervals) {
      covered += iv.contains(theta_star) ? 1 : 0;
      width += iv.width();
    }
    row.coverage = static_cast<double>(covered) / m;
    row.ci_width = width / m;
  }
  return row;
}

MetricsTable compute_metrics(const std::vector<ReplicationRecord>& records, double theta_star) {
  struct Group {
    std::size_t n;
    Scenario scenario;
    std::vector<const ReplicationRecord*> members;
    std::size_t excluded = 0;
  };
  std::vector<Group> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.n == r.n && g.scenario == r.scenario; });
    if (it == groups.end()) {
      groups.push_back({r.n, r.scenario, {}, 0});
      it = groups.end() - 1;
    }
    if (r.flagged) {
      ++it->excluded;
    } else {
      it->members.push_back(&r);
    }
  }
  if (groups.empty()) throw Error(ErrorCode::NoData, "no replication records");

  MetricsTable table;
  for (const auto& g : groups) {
    if (g.members.empty()) {
      throw Error(ErrorCode::NoData, "every replication flagged for n=" + std::to_string(g.n) + " " + g.scenario.id());
    }
    for (Estimator est : kEstimators) {
      std::vector<double> values;
      std::vector<Interval> intervals;
      for (const auto* r : g.members) {
        values.push_back(estimate_of(r->bundle, est));
        intervals.push_back(r->intervals[static_cast<std::size_t>(est)]);
      }
      MetricsRow row = summarize(values, intervals, theta_star);
      row.n = g.n;
      row.scenario = g.scenario;
      row.estimator = est;
      row.excluded = g.excluded;
      table.push_back(row);
    }
  }
  return table;
}

}  // namespace dracc
