#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dracc/nuisance.hpp"
#include "dracc/simgen.hpp"

namespace dracc {

/// One nuisance specification cell of the simulation grid.
struct Scenario {
  sim::Spec outcome = sim::Spec::Correct;
  sim::Spec propensity = sim::Spec::Correct;

  /// Stable index 0..3 (outcome major), used to derive bootstrap substreams.
  std::size_t index() const noexcept;
  /// Short id such as "mu-correct_pi-incorrect".
  std::string id() const;
  /// Human label such as "Correct mu, Incorrect pi".
  std::string label() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

std::vector<Scenario> all_scenarios();

/// Parses "cc", "ci", "ic", "ii" or a full id.
Scenario parse_scenario(std::string_view text);

struct StudyConfig {
  std::vector<std::size_t> sample_sizes{100, 200, 1000};
  std::size_t replications = 1000;
  std::vector<Scenario> scenarios = all_scenarios();
  std::uint64_t master_seed = 20240917;
  std::size_t bootstrap_b = 10000;
  double alpha = 0.05;
  unsigned workers = 0;  ///< 0 means available parallelism
  LogisticOptions nuisance{};

  /// Throws ConfigError.
  void validate() const;
  unsigned effective_workers() const noexcept;

  /// Sets one key from text; throws ConfigError on unknown keys or bad values.
  void apply(std::string_view key, std::string_view value);
};

/// Flat `key = value` lines; '#' starts a comment. Keys are applied in order
/// on top of the defaults.
StudyConfig load_study_config(const std::filesystem::path& path);
StudyConfig parse_study_config(std::string_view text);

/// (key, description) for every recognised config key.
const std::vector<std::pair<std::string, std::string>>& study_config_keys();

}  // namespace dracc
