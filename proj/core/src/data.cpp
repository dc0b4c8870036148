#include "dracc/data.hpp"

#include <atomic>
#include <cmath>
#include <fstream>

#include "dracc/csv.hpp"
#include "dracc/error.hpp"

namespace dracc {
namespace {

std::atomic<std::uint64_t> g_masked_reads{0};

bool is_missing_token(std::string_view token) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  return token.empty() || token == "NA";
}

std::size_t require_column(const csv::Table& table, const std::string& name) {
  auto idx = table.column(name);
  if (!idx) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header");
  return *idx;
}

double finite_cell(const csv::Table& table, std::size_t row, std::size_t col) {
  const std::string& token = table.rows[row][col];
  auto value = csv::parse_number(token);
  if (!value || !std::isfinite(*value)) {
    throw Error(ErrorCode::BadValue, "row " + std::to_string(row + 1) + ", column '" + table.header[col] +
                                         "': '" + token + "' is not a finite number");
  }
  return *value;
}

std::uint8_t binary_cell(const csv::Table& table, std::size_t row, std::size_t col) {
  const double v = finite_cell(table, row, col);
  if (v != 0.0 && v != 1.0) {
    throw Error(ErrorCode::BadValue, "row " + std::to_string(row + 1) + ", column '" + table.header[col] +
                                         "' must be 0 or 1");
  }
  return v == 1.0 ? 1 : 0;
}

Matrix covariate_block(const csv::Table& table, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& name : names) cols.push_back(require_column(table, name));
  Matrix x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = finite_cell(table, i, cols[j]);
    }
  }
  return x;
}

}  // namespace

MaskedOutcome::MaskedOutcome(std::vector<double> values, std::vector<std::uint8_t> valid)
    : values_(std::move(values)), valid_(std::move(valid)) {
  if (values_.size() != valid_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "outcome values and mask differ in length");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid_[i] > 1) throw Error(ErrorCode::BadValue, "mask entries must be 0 or 1");
    if (valid_[i] && !std::isfinite(values_[i])) {
      throw Error(ErrorCode::BadValue, "observed outcome at index " + std::to_string(i) + " is not finite");
    }
  }
}

MaskedOutcome MaskedOutcome::observed(std::span<const double> values) {
  return MaskedOutcome(std::vector<double>(values.begin(), values.end()),
                       std::vector<std::uint8_t>(values.size(), 1));
}

MaskedOutcome MaskedOutcome::masked_by(std::span<const double> values, std::span<const std::uint8_t> mask) {
  if (values.size() != mask.size()) throw Error(ErrorCode::DimensionMismatch, "outcome and mask lengths differ");
  std::vector<double> kept(values.size(), std::nan(""));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) kept[i] = values[i];
  }
  return MaskedOutcome(std::move(kept), std::vector<std::uint8_t>(mask.begin(), mask.end()));
}

std::size_t MaskedOutcome::observed_count() const noexcept {
  std::size_t count = 0;
  for (auto v : valid_) count += v;
  return count;
}

double MaskedOutcome::at(std::size_t i) const {
  if (!valid_.at(i)) {
    g_masked_reads.fetch_add(1, std::memory_order_relaxed);
    throw Error(ErrorCode::MaskedAccess, "read of masked outcome at index " + std::to_string(i));
  }
  return values_[i];
}

std::uint64_t MaskedOutcome::masked_access_count() noexcept { return g_masked_reads.load(); }
void MaskedOutcome::reset_masked_access_count() noexcept { g_masked_reads.store(0); }

Dataset::Dataset(Matrix covariates, Indicator response, MaskedOutcome outcome)
    : covariates_(std::move(covariates)), response_(std::move(response)), outcome_(std::move(outcome)) {
  const auto n = static_cast<std::size_t>(covariates_.rows());
  if (response_.size() != n || outcome_.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "covariates, response and outcome must have the same length");
  }
  if (!covariates_.allFinite()) throw Error(ErrorCode::BadValue, "covariates must be finite");
  for (std::size_t i = 0; i < n; ++i) {
    if (response_[i] > 1) throw Error(ErrorCode::BadValue, "response entries must be 0 or 1");
    if (response_[i] != outcome_.validity()[i]) {
      throw Error(ErrorCode::InconsistentRow, "outcome mask disagrees with response at row " + std::to_string(i));
    }
  }
}

AteDataset::AteDataset(std::shared_ptr<const Matrix> covariates, std::shared_ptr<const Indicator> treatment,
                       Vector outcome, std::string name)
    : covariates_(std::move(covariates)),
      treatment_(std::move(treatment)),
      outcome_(std::move(outcome)),
      name_(std::move(name)) {
  if (!covariates_ || !treatment_) throw Error(ErrorCode::InvalidArgument, "null covariates or treatment");
  const auto n = static_cast<std::size_t>(outcome_.size());
  if (static_cast<std::size_t>(covariates_->rows()) != n || treatment_->size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "covariates, treatment and outcome must have the same length");
  }
  if (!covariates_->allFinite() || !outcome_.allFinite()) {
    throw Error(ErrorCode::BadValue, "covariates and outcome must be finite");
  }
  std::size_t treated = 0;
  for (auto a : *treatment_) {
    if (a > 1) throw Error(ErrorCode::BadValue, "treatment entries must be 0 or 1");
    treated += a;
  }
  if (treated == 0 || treated == n) throw Error(ErrorCode::EmptyArm, "both arms must be nonempty");
}

std::size_t AteDataset::treated_count() const noexcept {
  std::size_t count = 0;
  for (auto a : *treatment_) count += a;
  return count;
}

Dataset load_missing_csv(const std::filesystem::path& path, const MissingSchema& schema) {
  const csv::Table table = csv::read(path);
  const std::size_t r_col = require_column(table, schema.response);
  const std::size_t y_col = require_column(table, schema.outcome);
  Matrix x = covariate_block(table, schema.covariates);

  const std::size_t n = table.rows.size();
  Indicator r(n);
  std::vector<double> y(n, std::nan(""));
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = binary_cell(table, i, r_col);
    const std::string& cell = table.rows[i][y_col];
    if (is_missing_token(cell)) {
      if (r[i]) throw Error(ErrorCode::InconsistentRow, "row " + std::to_string(i + 1) + " has R=1 but no outcome");
      continue;
    }
    const double v = finite_cell(table, i, y_col);
    // Values at R=0 rows are dropped: the estimators must never see them.
    if (r[i]) y[i] = v;
  }
  MaskedOutcome outcome(std::move(y), Indicator(r));
  return Dataset(std::move(x), std::move(r), std::move(outcome));
}

void write_missing_csv(const std::filesystem::path& path, const Dataset& data, const MissingSchema& schema) {
  if (schema.covariates.size() != data.p()) {
    throw Error(ErrorCode::DimensionMismatch, "schema names " + std::to_string(schema.covariates.size()) +
                                                  " covariates, dataset has " + std::to_string(data.p()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& name : schema.covariates) out << csv::quote_if_needed(name) << ',';
  out << csv::quote_if_needed(schema.response) << ',' << csv::quote_if_needed(schema.outcome) << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.p(); ++j) {
      out << csv::format_number(data.covariates()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
          << ',';
    }
    out << static_cast<int>(data.response()[i]) << ',';
    if (data.outcome().is_observed(i)) out << csv::format_number(data.outcome().at(i));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<AteDataset> load_ate_csv(const std::filesystem::path& path, const AteSchema& schema,
                                     const std::vector<std::string>& outcome_columns) {
  const csv::Table table = csv::read(path);
  const std::size_t a_col = require_column(table, schema.treatment);
  std::vector<std::size_t> y_cols;
  for (const auto& name : outcome_columns) y_cols.push_back(require_column(table, name));

  auto x = std::make_shared<const Matrix>(covariate_block(table, schema.covariates));
  const std::size_t n = table.rows.size();
  Indicator a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = binary_cell(table, i, a_col);
  auto treatment = std::make_shared<const Indicator>(std::move(a));

  std::size_t treated = 0;
  for (auto v : *treatment) treated += v;
  if (treated == 0 || treated == n) throw Error(ErrorCode::EmptyArm, "treatment column has an empty arm");

  std::vector<AteDataset> out;
  out.reserve(y_cols.size());
  for (std::size_t k = 0; k < y_cols.size(); ++k) {
    Vector y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = finite_cell(table, i, y_cols[k]);
    out.emplace_back(x, treatment, std::move(y), outcome_columns[k]);
  }
  return out;
}

std::vector<std::string> remaining_columns(const std::filesystem::path& path, const AteSchema& schema) {
  const csv::Table table = csv::read(path);
  std::vector<std::string> out;
  for (const auto& name : table.header) {
    if (name == schema.treatment) continue;
    bool is_covariate = false;
    for (const auto& c : schema.covariates) is_covariate = is_covariate || c == name;
    if (!is_covariate) out.push_back(name);
  }
  return out;
}

}  // namespace dracc
