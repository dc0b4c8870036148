#include "dracc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "dracc/error.hpp"

namespace dracc {

std::string_view to_string(IntervalMethod method) noexcept {
  return method == IntervalMethod::Wald ? "wald" : "parametric-bootstrap";
}

Vector InfluenceMatrix::dr_column() const { return values.col(0) + values.col(1) - values.col(2); }

InfluenceMatrix influence_matrix(const Vector& mu_hat, const Vector& pi_hat, std::span<const std::uint8_t> r,
                                 const MaskedOutcome& y, const EstimateBundle& bundle) {
  const auto n = static_cast<std::size_t>(mu_hat.size());
  if (static_cast<std::size_t>(pi_hat.size()) != n || r.size() != n || y.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "mu_hat, pi_hat, r and y must have equal length");
  }
  InfluenceMatrix infl;
  infl.values.resize(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    double ipw = 0.0, corr = 0.0;
    if (r[i]) {
      const double p = pi_hat(k);
      if (!(p > 0.0)) throw Error(ErrorCode::NonPositivePropensity, "pi_hat[" + std::to_string(i) + "]");
      ipw = y.at(i) / p;
      corr = mu_hat(k) / p;
    }
    infl.values(k, 0) = mu_hat(k) - bundle.theta_or;
    infl.values(k, 1) = ipw - bundle.theta_ipw;
    infl.values(k, 2) = corr - bundle.correction;
  }
  return infl;
}

CovMatrix3 covariance(const InfluenceMatrix& infl) {
  if (infl.n() < 2) throw Error(ErrorCode::NoData, "covariance needs at least two observations");
  CovMatrix3 out;
  out.sigma = (infl.values.transpose() * infl.values) / static_cast<double>(infl.n());
  // Force exact symmetry against rounding in the product.
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  return out;
}

Eigen::Matrix3d covariance_factor(const CovMatrix3& sigma) {
  if (!sigma.sigma.allFinite()) throw Error(ErrorCode::FactorizationFailure, "covariance has non-finite entries");
  if (sigma.sigma.isZero(0.0)) return Eigen::Matrix3d::Zero();

  Eigen::LLT<Eigen::Matrix3d> llt(sigma.sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double jitter = 1e-12 * sigma.sigma.trace();
  Eigen::Matrix3d bumped = sigma.sigma;
  bumped.diagonal().array() += jitter;
  llt.compute(bumped);
  if (jitter <= 0.0 || llt.info() != Eigen::Success) {
    throw Error(ErrorCode::FactorizationFailure, "covariance is not positive semidefinite");
  }
  return llt.matrixL();
}

std::vector<double> sample_W(const CovMatrix3& sigma, std::size_t b_count, Rng& rng) {
  if (b_count < 1000) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least 1000 draws");
  const Eigen::Matrix3d l = covariance_factor(sigma);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(b_count);
  for (std::size_t b = 0; b < b_count; ++b) {
    const double g0 = normal(rng);
    const double g1 = normal(rng);
    const double g2 = normal(rng);
    const double z_or = l(0, 0) * g0;
    const double z_ipw = l(1, 0) * g0 + l(1, 1) * g1;
    const double z_corr = l(2, 0) * g0 + l(2, 1) * g1 + l(2, 2) * g2;
    w[b] = clipped_limit(z_or, z_ipw, z_corr);
  }
  return w;
}

double sorted_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorCode::NoData, "quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability outside [0, 1]");
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_interval(double theta, std::size_t n, std::vector<double>& draws, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (n == 0) throw Error(ErrorCode::NoData, "n must be positive");
  std::sort(draws.begin(), draws.end());
  const double q_lo = sorted_quantile(draws, alpha / 2.0);
  const double q_hi = sorted_quantile(draws, 1.0 - alpha / 2.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  return Interval{theta - q_hi / root_n, theta - q_lo / root_n, 1.0 - alpha, IntervalMethod::ParametricBootstrap};
}

Interval acc_interval(const EstimateBundle& bundle, const CovMatrix3& sigma, std::size_t b_count, double alpha,
                      Rng& rng) {
  std::vector<double> w = sample_W(sigma, b_count, rng);
  return bootstrap_interval(bundle.theta_acc, bundle.n, w, alpha);
}

double influence_variance(const Vector& phi) {
  if (phi.size() < 2) throw Error(ErrorCode::NoData, "variance needs at least two observations");
  const double mean = phi.mean();
  return (phi.array() - mean).square().sum() / static_cast<double>(phi.size());
}

Interval wald_interval_from_variance(double theta, double variance, std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (n < 2) throw Error(ErrorCode::NoData, "n must be at least 2");
  const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(std::max(variance, 0.0) / static_cast<double>(n));
  return Interval{theta - half, theta + half, 1.0 - alpha, IntervalMethod::Wald};
}

Interval wald_interval(double theta, const Vector& phi, double alpha) {
  return wald_interval_from_variance(theta, influence_variance(phi), static_cast<std::size_t>(phi.size()), alpha);
}

}  // namespace dracc
