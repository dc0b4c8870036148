#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dracc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Binary indicator per unit (response R or treatment A), entries 0 or 1.
using Indicator = std::vector<std::uint8_t>;

/// Outcome vector with an explicit validity mask. Reading a masked cell is a
/// programming error: it bumps a process-wide counter and throws MaskedAccess.
class MaskedOutcome {
 public:
  MaskedOutcome() = default;
  MaskedOutcome(std::vector<double> values, std::vector<std::uint8_t> valid);

  /// Fully observed outcome.
  static MaskedOutcome observed(std::span<const double> values);
  /// Observed exactly where `mask` is 1.
  static MaskedOutcome masked_by(std::span<const double> values, std::span<const std::uint8_t> mask);

  std::size_t size() const noexcept { return values_.size(); }
  bool is_observed(std::size_t i) const { return valid_[i] != 0; }
  std::size_t observed_count() const noexcept;

  /// Value at an observed index.
  double at(std::size_t i) const;

  std::span<const std::uint8_t> validity() const noexcept { return valid_; }

  static std::uint64_t masked_access_count() noexcept;
  static void reset_masked_access_count() noexcept;

 private:
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

/// Missing-outcome data: covariates X, response R and outcome Y observed
/// where R = 1. Immutable once built.
class Dataset {
 public:
  Dataset(Matrix covariates, Indicator response, MaskedOutcome outcome);

  std::size_t n() const noexcept { return static_cast<std::size_t>(covariates_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(covariates_.cols()); }
  const Matrix& covariates() const noexcept { return covariates_; }
  const Indicator& response() const noexcept { return response_; }
  const MaskedOutcome& outcome() const noexcept { return outcome_; }

 private:
  Matrix covariates_;
  Indicator response_;
  MaskedOutcome outcome_;
};

/// One outcome of a two-arm study. Covariates and treatment are shared
/// between all outcomes loaded from the same table.
class AteDataset {
 public:
  AteDataset(std::shared_ptr<const Matrix> covariates, std::shared_ptr<const Indicator> treatment, Vector outcome,
             std::string name = {});

  std::size_t n() const noexcept { return static_cast<std::size_t>(outcome_.size()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(covariates_->cols()); }
  const Matrix& covariates() const noexcept { return *covariates_; }
  const Indicator& treatment() const noexcept { return *treatment_; }
  const Vector& outcome() const noexcept { return outcome_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t treated_count() const noexcept;

  const std::shared_ptr<const Matrix>& shared_covariates() const noexcept { return covariates_; }
  const std::shared_ptr<const Indicator>& shared_treatment() const noexcept { return treatment_; }

 private:
  std::shared_ptr<const Matrix> covariates_;
  std::shared_ptr<const Indicator> treatment_;
  Vector outcome_;
  std::string name_;
};

struct MissingSchema {
  std::vector<std::string> covariates;
  std::string response;
  std::string outcome;
};

struct AteSchema {
  std::vector<std::string> covariates;
  std::string treatment;
};

Dataset load_missing_csv(const std::filesystem::path& path, const MissingSchema& schema);

/// Writes with full round-trip precision; masked outcomes are empty cells.
void write_missing_csv(const std::filesystem::path& path, const Dataset& data, const MissingSchema& schema);

std::vector<AteDataset> load_ate_csv(const std::filesystem::path& path, const AteSchema& schema,
                                     const std::vector<std::string>& outcome_columns);

/// Header columns that are neither covariates nor the treatment.
std::vector<std::string> remaining_columns(const std::filesystem::path& path, const AteSchema& schema);

}  // namespace dracc
