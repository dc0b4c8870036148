#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dracc::plot {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  double bin_width() const noexcept { return (hi - lo) / static_cast<double>(counts.size()); }
  std::size_t total() const noexcept;
};

/// Equal-width bins over [min, max] of the values and the optional reference.
/// A zero-width range is widened to +/- 0.5 around the value.
Histogram make_histogram(std::span<const double> values, std::size_t bins,
                         const double* reference = nullptr);

/// One <rect> per bin plus a vertical reference line.
std::string histogram_svg(const Histogram& h, double reference, std::string_view title);

/// bin_lo,bin_hi,count
std::string histogram_csv(const Histogram& h);

/// Writes the SVG and the bin counts CSV. Needs at least two values.
void emit_histogram_svg(std::span<const double> values, std::size_t bins, double reference,
                        const std::filesystem::path& svg_path, const std::filesystem::path& csv_path,
                        std::string_view title = {});

/// Scatter of y against x with the identity line.
std::string scatter_svg(std::span<const double> x, std::span<const double> y, std::string_view x_label,
                        std::string_view y_label, std::string_view title);

/// Density histogram of draws overlaid with the N(0, sd^2) density.
std::string density_overlay_svg(std::span<const double> draws, std::size_t bins, double gaussian_sd,
                                std::string_view title);

}  // namespace dracc::plot
