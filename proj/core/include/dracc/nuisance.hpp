#pragma once

#include <cstddef>
#include <span>

#include "dracc/data.hpp"

namespace dracc {

/// Fitted outcome regression mu(x) = E[Y | X = x, R = 1]. Coefficients are on
/// the caller's (unstandardized) scale.
struct OutcomeModel {
  enum class Kind { Linear, DiffInMeans };

  Kind kind = Kind::Linear;
  double intercept = 0.0;
  Vector coefficients;
  double mean1 = 0.0;  ///< DiffInMeans: treated-arm mean
  double mean0 = 0.0;  ///< DiffInMeans: control-arm mean

  static OutcomeModel linear(double intercept, Vector coefficients);
  static OutcomeModel diff_in_means(double mean1, double mean0);
};

/// Logistic propensity pi(x) = P(R = 1 | X = x), predictions clamped to
/// [floor, 1 - floor].
struct PropensityModel {
  double intercept = 0.0;
  Vector coefficients;
  double floor = 1e-6;
  int iterations = 0;
};

struct LogisticOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double floor = 1e-6;
  double separation_cap = 50.0;
};

/// Least squares with intercept on an m x p design (p may be 0). Columns are
/// standardized internally and solved with a column-pivoted QR; the rank test
/// runs on the standardized system.
OutcomeModel fit_ols(const Matrix& design, const Vector& y);

/// Maximum likelihood logistic regression with intercept by IRLS with step
/// halving. Convergence: max |score| < tol or relative log-likelihood change
/// < tol. Throws NoVariation, TooFewRows, Separation or NotConverged.
PropensityModel fit_logistic(const Matrix& design, std::span<const std::uint8_t> r,
                             const LogisticOptions& options = {});

/// Linear predictor for Linear models. DiffInMeans models need one arm label
/// per row and return that arm's mean.
Vector predict_mu(const OutcomeModel& model, const Matrix& covariates,
                  std::span<const std::uint8_t> arms = {});

Vector predict_pi(const PropensityModel& model, const Matrix& covariates);

/// Difference-in-means outcome model: arm means of y.
OutcomeModel fit_diff_in_means(const Vector& y, std::span<const std::uint8_t> a);

/// Hajek-style normalization of treatment propensities. Treated entries are
/// scaled by n^-1 sum A/pi, the control probability 1 - pi by
/// n^-1 sum (1 - A)/(1 - pi), so inverse weights average one within each arm.
/// The result is clamped to [eps, 1 - eps].
Vector hajek_rescale(const Vector& pi_tilde, std::span<const std::uint8_t> a, double eps);

/// Rows of `m` whose mask entry is 1.
Matrix select_rows(const Matrix& m, std::span<const std::uint8_t> mask);

double expit(double eta) noexcept;

}  // namespace dracc
