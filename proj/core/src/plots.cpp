#include "dracc/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "dracc/csv.hpp"
#include "dracc/error.hpp"
#include "dracc/report.hpp"

namespace dracc::plot {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void open_svg(std::ostringstream& out, std::string_view title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << escape(title) << "</text>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
}

void axis_labels(std::ostringstream& out, double lo, double hi, std::string_view x_label) {
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << num(lo) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << num(hi) << "</text>\n";
  if (!x_label.empty()) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << escape(x_label)
        << "</text>\n";
  }
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

}  // namespace

std::size_t Histogram::total() const noexcept {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins, const double* reference) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (reference && std::isfinite(*reference)) {
    lo = std::min(lo, *reference);
    hi = std::max(hi, *reference);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 0.0;
  }
  std::tie(h.lo, h.hi) = padded_range(lo, hi);
  const double w = h.bin_width();
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    auto idx = static_cast<std::size_t>(std::clamp(std::floor((v - h.lo) / w), 0.0, static_cast<double>(bins - 1)));
    ++h.counts[idx];
  }
  return h;
}

std::string histogram_svg(const Histogram& h, double reference, std::string_view title) {
  std::ostringstream out;
  open_svg(out, title);
  const std::size_t peak = std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const double bar_w = plot_w / static_cast<double>(h.counts.size());
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double bar_h = plot_h * static_cast<double>(h.counts[b]) / static_cast<double>(peak);
    out << "<rect x=\"" << num(kMargin + bar_w * static_cast<double>(b)) << "\" y=\""
        << num(kHeight - kMargin - bar_h) << "\" width=\"" << num(bar_w) << "\" height=\"" << num(bar_h)
        << "\" fill=\"steelblue\" stroke=\"white\"/>\n";
  }
  if (reference >= h.lo && reference <= h.hi) {
    const double x = kMargin + plot_w * (reference - h.lo) / (h.hi - h.lo);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << kMargin << "\" x2=\"" << num(x) << "\" y2=\""
        << kHeight - kMargin << "\" stroke=\"crimson\" stroke-width=\"2\" stroke-dasharray=\"6,3\"/>\n";
  }
  axis_labels(out, h.lo, h.hi, "");
  out << "</svg>\n";
  return out.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  const double w = h.bin_width();
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << csv::format_number(h.lo + w * static_cast<double>(b)) << ','
        << csv::format_number(h.lo + w * static_cast<double>(b + 1)) << ',' << h.counts[b] << '\n';
  }
  return out.str();
}

void emit_histogram_svg(std::span<const double> values, std::size_t bins, double reference,
                        const std::filesystem::path& svg_path, const std::filesystem::path& csv_path,
                        std::string_view title) {
  if (values.size() < 2) throw Error(ErrorCode::NoData, "histogram needs at least two values");
  const Histogram h = make_histogram(values, bins, &reference);
  write_text_file(svg_path, histogram_svg(h, reference, title));
  write_text_file(csv_path, histogram_csv(h));
}

std::string scatter_svg(std::span<const double> x, std::span<const double> y, std::string_view x_label,
                        std::string_view y_label, std::string_view title) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "scatter needs paired values");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    lo = std::min({lo, x[i], y[i]});
    hi = std::max({hi, x[i], y[i]});
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  std::tie(lo, hi) = padded_range(lo, hi);
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  auto px = [&](double v) { return kMargin + plot_w * (v - lo) / (hi - lo); };
  auto py = [&](double v) { return kHeight - kMargin - plot_h * (v - lo) / (hi - lo); };

  std::ostringstream out;
  open_svg(out, title);
  out << "<line x1=\"" << num(px(lo)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(hi)) << "\" y2=\""
      << num(py(hi)) << "\" stroke=\"gray\" stroke-dasharray=\"4,4\"/>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    out << "<circle cx=\"" << num(px(x[i])) << "\" cy=\"" << num(py(y[i]))
        << "\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n";
  }
  axis_labels(out, lo, hi, x_label);
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << kHeight / 2 << ")\" text-anchor=\"middle\">" << escape(y_label)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string density_overlay_svg(std::span<const double> draws, std::size_t bins, double gaussian_sd,
                                std::string_view title) {
  const Histogram h = make_histogram(draws, bins);
  const double total = static_cast<double>(std::max<std::size_t>(1, h.total()));
  const double w = h.bin_width();
  auto gauss = [&](double x) {
    if (!(gaussian_sd > 0.0)) return 0.0;
    return std::exp(-0.5 * x * x / (gaussian_sd * gaussian_sd)) / (gaussian_sd * std::sqrt(2.0 * std::numbers::pi));
  };
  double peak = 0.0;
  for (auto c : h.counts) peak = std::max(peak, static_cast<double>(c) / (total * w));
  peak = std::max(peak, gauss(0.0));
  if (!(peak > 0.0)) peak = 1.0;

  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  std::ostringstream out;
  open_svg(out, title);
  const double bar_w = plot_w / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double dens = static_cast<double>(h.counts[b]) / (total * w);
    const double bar_h = plot_h * dens / peak;
    out << "<rect x=\"" << num(kMargin + bar_w * static_cast<double>(b)) << "\" y=\""
        << num(kHeight - kMargin - bar_h) << "\" width=\"" << num(bar_w) << "\" height=\"" << num(bar_h)
        << "\" fill=\"lightsteelblue\" stroke=\"white\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" points=\"";
  constexpr int kSteps = 200;
  for (int s = 0; s <= kSteps; ++s) {
    const double x = h.lo + (h.hi - h.lo) * s / kSteps;
    out << num(kMargin + plot_w * s / kSteps) << ',' << num(kHeight - kMargin - plot_h * gauss(x) / peak) << ' ';
  }
  out << "\"/>\n";
  axis_labels(out, h.lo, h.hi, "W");
  out << "</svg>\n";
  return out.str();
}

}  // namespace dracc::plot
