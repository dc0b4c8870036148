#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dracc/data.hpp"
#include "dracc/estimators.hpp"
#include "dracc/inference.hpp"
#include "dracc/nuisance.hpp"
#include "dracc/study.hpp"

namespace dracc {

/// How per-arm bootstrap draws become a DR+ACC interval for the effect.
enum class AteCiMode {
  SumArms,       ///< independent arm draws combined draw by draw
  PerArmReport,  ///< per-arm intervals, effect interval [lo1 - hi0, hi1 - lo0]
};

std::string_view to_string(AteCiMode mode) noexcept;
AteCiMode parse_ate_ci_mode(std::string_view text);
AteClipping parse_ate_clipping(std::string_view text);

struct AteConfig {
  double alpha = 0.05;
  std::size_t bootstrap_b = kDefaultBootstrapDraws;
  double eps = 0.01;  ///< propensity floor and Hajek clamp
  std::uint64_t seed = 20240917;
  AteClipping clipping = AteClipping::PerArm;
  AteCiMode ci_mode = AteCiMode::SumArms;
  LogisticOptions logistic{};
};

struct AteOutcomeResult {
  std::string name;
  bool ok = false;
  std::string error;
  AteEstimate estimate;
  std::array<Interval, 4> intervals{};  ///< indexed by Estimator
  std::array<bool, 4> significant{};
  Interval acc_arm1;  ///< per-arm DR+ACC intervals for the arm means
  Interval acc_arm0;
};

struct AteReport {
  std::size_t n = 0;
  std::size_t n_treated = 0;
  PropensityModel propensity;
  std::vector<AteOutcomeResult> outcomes;
  std::array<std::size_t, 4> significant_counts{};
  AteConfig config;
};

/// Wald intervals for OR, IPW and DR add the two arms' influence variances.
/// An interval is significant when it excludes zero by more than a rounding
/// floor of 1e-10 (1 + max |Y|). No multiple-testing correction.
AteReport analyze_ate(const std::vector<AteDataset>& outcomes, const AteConfig& config);

/// Loads the table, fits one logistic propensity on the covariates, Hajek
/// rescales it and analyses every outcome column. Per-outcome failures are
/// recorded and the analysis continues.
AteReport analyze_ate(const std::filesystem::path& path, const AteSchema& schema,
                      const std::vector<std::string>& outcome_columns, const AteConfig& config);

std::string ate_results_csv(const AteReport& report);
std::string ate_summary_markdown(const AteReport& report);

}  // namespace dracc
