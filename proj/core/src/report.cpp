#include "dracc/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dracc/csv.hpp"
#include "dracc/error.hpp"

namespace dracc {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string render_csv(const MetricsTable& table) {
  std::ostringstream out;
  out << "n,scenario,estimator,bias,rmse,mae,coverage,ci_width,count,excluded\n";
  for (const auto& r : table) {
    out << r.n << ',' << r.scenario.id() << ',' << to_string(r.estimator) << ',' << csv::format_number(r.bias) << ','
        << csv::format_number(r.rmse) << ',' << csv::format_number(r.mae) << ',' << csv::format_number(r.coverage)
        << ',' << csv::format_number(r.ci_width) << ',' << r.count << ',' << r.excluded << '\n';
  }
  return out.str();
}

std::string render_markdown(const MetricsTable& table) {
  std::ostringstream out;
  std::size_t current_n = 0;
  bool first_table = true;
  const Scenario* current_scenario = nullptr;
  for (const auto& r : table) {
    if (first_table || r.n != current_n) {
      if (!first_table) out << '\n';
      out << "### n = " << r.n << "\n\n";
      out << "| Scenario | Estimator | Bias | RMSE | MAE | Coverage | CI Width |\n";
      out << "|---|---|---:|---:|---:|---:|---:|\n";
      current_n = r.n;
      current_scenario = nullptr;
      first_table = false;
    }
    const bool new_group = current_scenario == nullptr || !(*current_scenario == r.scenario);
    std::string scenario_cell;
    if (new_group) {
      scenario_cell = r.scenario.label();
      if (r.excluded > 0) scenario_cell += " (" + std::to_string(r.excluded) + " excluded)";
    }
    out << "| " << scenario_cell << " | " << to_string(r.estimator) << " | " << fixed(r.bias, 3) << " | "
        << fixed(r.rmse, 3) << " | " << fixed(r.mae, 3) << " | " << fixed(r.coverage, 3) << " | "
        << fixed(r.ci_width, 2) << " |\n";
    current_scenario = &r.scenario;
  }
  return out.str();
}

}  // namespace

std::string render_report(const MetricsTable& table, ReportFormat format) {
  return format == ReportFormat::Csv ? render_csv(table) : render_markdown(table);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void emit_report(const MetricsTable& table, ReportFormat format, const std::filesystem::path& path) {
  write_text_file(path, render_report(table, format));
}

}  // namespace dracc
