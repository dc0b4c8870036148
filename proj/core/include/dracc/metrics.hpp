#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dracc/inference.hpp"
#include "dracc/study.hpp"

namespace dracc {

struct MetricsRow {
  std::size_t n = 0;
  Scenario scenario;
  Estimator estimator = Estimator::OR;
  double bias = 0.0;
  double rmse = 0.0;
  double mae = 0.0;  ///< median absolute error
  double coverage = 0.0;
  double ci_width = 0.0;
  std::size_t count = 0;     ///< replications used
  std::size_t excluded = 0;  ///< flagged replications left out
};

using MetricsTable = std::vector<MetricsRow>;

/// bias = mean(est) - theta*, rmse = sqrt(mean((est - theta*)^2)),
/// mae = median |est - theta*| (midpoint for even counts), coverage = share of
/// intervals containing theta*, ci_width = mean(hi - lo). Throws NoData.
MetricsRow summarize(std::span<const double> estimates, std::span<const Interval> intervals, double theta_star);

/// One row per (sample size, scenario, estimator), in record order. Flagged
/// records are excluded and counted.
MetricsTable compute_metrics(const std::vector<ReplicationRecord>& records, double theta_star);

double median(std::vector<double> values);

}  // namespace dracc
