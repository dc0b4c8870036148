#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dracc::csv {

/// Comma separated, header row required, '.' decimal point. Fields may be
/// double-quoted; a doubled quote inside a quoted field is a literal quote.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

std::vector<std::string> split_line(std::string_view line);

/// Parses a finite or non-finite decimal; trailing garbage fails.
std::optional<double> parse_number(std::string_view token);

/// Shortest round-trippable text for a double ("%.17g").
std::string format_number(double value);

std::string quote_if_needed(std::string_view field);

}  // namespace dracc::csv
