#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dracc/data.hpp"
#include "dracc/estimators.hpp"
#include "dracc/rng.hpp"

namespace dracc {

/// Default number of parametric bootstrap draws.
inline constexpr std::size_t kDefaultBootstrapDraws = 10000;

/// Inverse standard normal CDF (Wichura's AS 241, about 1e-16 relative).
double normal_quantile(double p);

/// Centered per-observation contributions, columns (OR, IPW, correction).
struct InfluenceMatrix {
  Eigen::Matrix<double, Eigen::Dynamic, 3> values;

  std::size_t n() const noexcept { return static_cast<std::size_t>(values.rows()); }
  /// phi_OR + phi_IPW - phi_correction.
  Vector dr_column() const;
};

struct CovMatrix3 {
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
};

enum class IntervalMethod { Wald, ParametricBootstrap };

std::string_view to_string(IntervalMethod method) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  IntervalMethod method = IntervalMethod::Wald;

  bool contains(double value) const noexcept { return lo <= value && value <= hi; }
  double width() const noexcept { return hi - lo; }
};

InfluenceMatrix influence_matrix(const Vector& mu_hat, const Vector& pi_hat, std::span<const std::uint8_t> r,
                                 const MaskedOutcome& y, const EstimateBundle& bundle);

/// Sigma_jk = n^-1 sum_i phi_ij phi_ik (no n - 1 correction).
CovMatrix3 covariance(const InfluenceMatrix& infl);

/// Lower-triangular factor L with L L^T = sigma. On failure the diagonal is
/// jittered by 1e-12 * trace once; an all-zero sigma yields a zero factor.
Eigen::Matrix3d covariance_factor(const CovMatrix3& sigma);

/// W = Z_OR + Z_IPW - clip(Z_corr, Z_OR, Z_IPW) for one Gaussian draw.
inline double clipped_limit(double z_or, double z_ipw, double z_corr) noexcept {
  return z_or + z_ipw - clip(z_corr, z_or, z_ipw);
}

/// B draws of W with (Z_OR, Z_IPW, Z_corr) ~ N(0, sigma). Each draw consumes
/// three standard normals from `rng` in order. Requires b_count >= 1000.
std::vector<double> sample_W(const CovMatrix3& sigma, std::size_t b_count, Rng& rng);

/// Type-7 empirical quantile (linear interpolation between order statistics)
/// of an ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double prob);

/// [theta - q_{1-a/2} / sqrt(n), theta - q_{a/2} / sqrt(n)] from draws of the
/// limit law. Sorts `draws` in place.
Interval bootstrap_interval(double theta, std::size_t n, std::vector<double>& draws, double alpha);

/// Parametric bootstrap interval for DR+ACC.
Interval acc_interval(const EstimateBundle& bundle, const CovMatrix3& sigma, std::size_t b_count, double alpha,
                      Rng& rng);

/// theta +/- z_{1-a/2} sqrt(var(phi) / n), variance with 1/n normalization.
Interval wald_interval(double theta, const Vector& phi, double alpha);

/// Same, from a precomputed influence variance.
Interval wald_interval_from_variance(double theta, double variance, std::size_t n, double alpha);

/// 1/n variance of a column.
double influence_variance(const Vector& phi);

}  // namespace dracc
