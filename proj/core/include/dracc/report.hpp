#pragma once

#include <filesystem>
#include <string>

#include "dracc/metrics.hpp"

namespace dracc {

enum class ReportFormat { Csv, Markdown };

/// CSV: one row per (n, scenario, estimator). Markdown: one table per sample
/// size, rows grouped by scenario with the scenario named on its first row.
/// Byte output is a pure function of the table.
std::string render_report(const MetricsTable& table, ReportFormat format);

void emit_report(const MetricsTable& table, ReportFormat format, const std::filesystem::path& path);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dracc
