#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dracc/config.hpp"
#include "dracc/estimators.hpp"
#include "dracc/inference.hpp"
#include "dracc/simgen.hpp"

namespace dracc {

enum class Estimator { OR = 0, IPW = 1, DR = 2, ACC = 3 };

inline constexpr std::array<Estimator, 4> kEstimators{Estimator::OR, Estimator::IPW, Estimator::DR, Estimator::ACC};

std::string_view to_string(Estimator e) noexcept;
double estimate_of(const EstimateBundle& bundle, Estimator e) noexcept;

struct ReplicationRecord {
  std::size_t n = 0;
  Scenario scenario;
  std::size_t replication = 0;
  EstimateBundle bundle;
  std::array<Interval, 4> intervals{};  ///< indexed by Estimator
  bool flagged = false;                 ///< excluded from metrics
  std::string error;                    ///< error code name when flagged
  bool audit_ok = true;                 ///< safety and convexity checks passed
};

/// Everything computed for one (sample, scenario) cell.
struct ScenarioFit {
  EstimateBundle bundle;
  CovMatrix3 sigma;
  InfluenceMatrix influence;
  std::array<Interval, 4> intervals{};
};

/// Seed of the simulated sample for replication `rep` at size `n`. All
/// scenarios of a replication share the sample.
std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t n, std::size_t rep) noexcept;

/// Seed of the bootstrap stream for one scenario of one sample.
std::uint64_t bootstrap_seed(std::uint64_t sample_seed, const Scenario& scenario) noexcept;

/// Fits both nuisances on the design the scenario calls for (outcome model on
/// R = 1 rows, propensity on all rows), then computes the bundle and all four
/// intervals. Wald for OR, IPW and DR; parametric bootstrap for DR+ACC.
ScenarioFit fit_scenario(const sim::SimulatedSample& sample, const Scenario& scenario, const StudyConfig& config,
                         Rng& bootstrap_rng);

/// Interval property, safety at theta_star and the convex-combination
/// identity, all within 1e-9.
bool audit_bundle(const EstimateBundle& bundle, double theta_star) noexcept;

/// Records ordered by (sample size, scenario, replication) as listed in the
/// config. Per-replication failures are recorded, never thrown. Output does
/// not depend on the worker count.
std::vector<ReplicationRecord> run_study(const StudyConfig& config);

/// Raw per-replication fields, one row per record, full precision.
std::string records_csv(const std::vector<ReplicationRecord>& records);
void write_records_csv(const std::filesystem::path& path, const std::vector<ReplicationRecord>& records);

/// Draws of the limit law W for one replication, for plotting against a
/// Gaussian with the same variance.
struct LimitLawSample {
  std::vector<double> draws;
  double gaussian_sd = 0.0;  ///< sd of Z_OR + Z_IPW - Z_corr under sigma
};
LimitLawSample limit_law_sample(const StudyConfig& config, std::size_t n, const Scenario& scenario, std::size_t rep);

}  // namespace dracc
