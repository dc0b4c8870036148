#include "dracc/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>

#include "dracc/error.hpp"

namespace dracc {
namespace {

// Intercept column followed by centered, unit-variance copies of the design.
struct Standardized {
  Matrix augmented;
  Vector center;
  Vector scale;
};

Standardized standardize(const Matrix& design) {
  const Eigen::Index m = design.rows();
  const Eigen::Index p = design.cols();
  Standardized s;
  s.center = design.colwise().mean().transpose();
  s.scale.resize(p);
  s.augmented.resize(m, p + 1);
  s.augmented.col(0).setOnes();
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto centered = (design.col(j).array() - s.center(j)).matrix();
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(m));
    if (!(sd > 1e-12 * (1.0 + std::abs(s.center(j))))) {
      throw Error(ErrorCode::RankDeficient, "design column " + std::to_string(j) + " is constant");
    }
    s.scale(j) = sd;
    s.augmented.col(j + 1) = centered / sd;
  }
  return s;
}

// Maps standardized-scale coefficients (intercept first) back to raw scale.
void unstandardize(const Vector& gamma, const Standardized& s, double& intercept, Vector& coefficients) {
  const Eigen::Index p = s.scale.size();
  coefficients = gamma.tail(p).cwiseQuotient(s.scale);
  intercept = gamma(0) - coefficients.dot(s.center);
}

double softplus(double x) noexcept { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_likelihood(const Vector& eta, std::span<const std::uint8_t> r) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll -= r[static_cast<std::size_t>(i)] ? softplus(-eta(i)) : softplus(eta(i));
  }
  return ll;
}

}  // namespace

double expit(double eta) noexcept {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

OutcomeModel OutcomeModel::linear(double intercept, Vector coefficients) {
  OutcomeModel m;
  m.kind = Kind::Linear;
  m.intercept = intercept;
  m.coefficients = std::move(coefficients);
  if (!std::isfinite(m.intercept) || !m.coefficients.allFinite()) {
    throw Error(ErrorCode::BadValue, "outcome model parameters must be finite");
  }
  return m;
}

OutcomeModel OutcomeModel::diff_in_means(double mean1, double mean0) {
  if (!std::isfinite(mean1) || !std::isfinite(mean0)) {
    throw Error(ErrorCode::BadValue, "arm means must be finite");
  }
  OutcomeModel m;
  m.kind = Kind::DiffInMeans;
  m.mean1 = mean1;
  m.mean0 = mean0;
  return m;
}

Matrix select_rows(const Matrix& m, std::span<const std::uint8_t> mask) {
  if (static_cast<Eigen::Index>(mask.size()) != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "row mask length differs from matrix rows");
  }
  Eigen::Index kept = 0;
  for (auto v : mask) kept += v ? 1 : 0;
  Matrix out(kept, m.cols());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) out.row(k++) = m.row(i);
  }
  return out;
}

OutcomeModel fit_ols(const Matrix& design, const Vector& y) {
  if (design.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "design rows differ from y length");
  if (design.rows() <= design.cols() + 1) {
    throw Error(ErrorCode::TooFewRows, std::to_string(design.rows()) + " rows for " +
                                           std::to_string(design.cols()) + " covariates plus intercept");
  }
  if (!design.allFinite() || !y.allFinite()) throw Error(ErrorCode::BadValue, "non-finite input to fit_ols");

  const Standardized s = standardize(design);
  Eigen::ColPivHouseholderQR<Matrix> qr(s.augmented);
  qr.setThreshold(1e-10);
  if (qr.rank() < s.augmented.cols()) {
    throw Error(ErrorCode::RankDeficient, "design has rank " + std::to_string(qr.rank()) + " < " +
                                              std::to_string(s.augmented.cols()));
  }
  const Vector gamma = qr.solve(y);
  double intercept = 0.0;
  Vector coefficients;
  unstandardize(gamma, s, intercept, coefficients);
  return OutcomeModel::linear(intercept, std::move(coefficients));
}

PropensityModel fit_logistic(const Matrix& design, std::span<const std::uint8_t> r, const LogisticOptions& options) {
  const Eigen::Index n = design.rows();
  if (static_cast<Eigen::Index>(r.size()) != n) throw Error(ErrorCode::DimensionMismatch, "r length differs");
  if (!(options.floor > 0.0 && options.floor < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "propensity floor must lie in (0, 0.5)");
  }
  std::size_t ones = 0;
  for (auto v : r) {
    if (v > 1) throw Error(ErrorCode::BadValue, "r must be binary");
    ones += v;
  }
  if (ones == 0 || ones == r.size()) throw Error(ErrorCode::NoVariation, "only one class present");
  if (n <= design.cols() + 1) throw Error(ErrorCode::TooFewRows, "too few rows for logistic regression");
  if (!design.allFinite()) throw Error(ErrorCode::BadValue, "non-finite design");

  const Standardized s = standardize(design);
  const Matrix& a = s.augmented;
  Vector rv(n);
  for (Eigen::Index i = 0; i < n; ++i) rv(i) = r[static_cast<std::size_t>(i)];

  Vector beta = Vector::Zero(a.cols());
  const double rate = static_cast<double>(ones) / static_cast<double>(n);
  beta(0) = std::log(rate / (1.0 - rate));

  Vector eta = a * beta;
  double ll = log_likelihood(eta, r);
  bool converged = false;
  int iter = 0;
  Vector pi(n);
  for (; iter < options.max_iter; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) pi(i) = expit(eta(i));
    const Vector residual = rv - pi;
    const Vector score = a.transpose() * residual;
    if (score.cwiseAbs().maxCoeff() < options.tol) {
      converged = true;
      break;
    }

    // Newton step as the weighted least-squares problem
    // min || W^1/2 A d - W^-1/2 (r - pi) ||.
    Vector sw(n);
    for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(std::max(pi(i) * (1.0 - pi(i)), 1e-200));
    const Matrix weighted = sw.asDiagonal() * a;
    const Vector target = residual.cwiseQuotient(sw);
    const Vector step = Eigen::ColPivHouseholderQR<Matrix>(weighted).solve(target);

    double t = 1.0;
    Vector candidate = beta + step;
    Vector candidate_eta = a * candidate;
    double candidate_ll = log_likelihood(candidate_eta, r);
    for (int halvings = 0; halvings < 30 && !(candidate_ll >= ll); ++halvings) {
      t *= 0.5;
      candidate = beta + t * step;
      candidate_eta = a * candidate;
      candidate_ll = log_likelihood(candidate_eta, r);
    }
    if (!candidate.allFinite() || candidate.norm() > options.separation_cap) {
      throw Error(ErrorCode::Separation, "coefficient norm exceeded " + std::to_string(options.separation_cap));
    }
    const double change = std::abs(candidate_ll - ll) / std::max(std::abs(ll), 1e-300);
    beta = candidate;
    eta = candidate_eta;
    ll = candidate_ll;
    if (change < options.tol) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NotConverged, std::to_string(options.max_iter) + " iterations exhausted");

  // Complete separation can also stall with a vanishing score before the
  // coefficient cap is reached: every unit is then fit with certainty.
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(rv(i) - expit(eta(i))));
  if (worst < 1e-6) throw Error(ErrorCode::Separation, "fitted probabilities are 0 or 1 for every unit");

  PropensityModel model;
  unstandardize(beta, s, model.intercept, model.coefficients);
  model.floor = options.floor;
  model.iterations = iter;
  return model;
}

Vector predict_mu(const OutcomeModel& model, const Matrix& covariates, std::span<const std::uint8_t> arms) {
  if (model.kind == OutcomeModel::Kind::DiffInMeans) {
    if (static_cast<Eigen::Index>(arms.size()) != covariates.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "difference-in-means prediction needs one arm label per row");
    }
    Vector out(covariates.rows());
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = arms[static_cast<std::size_t>(i)] ? model.mean1 : model.mean0;
    return out;
  }
  if (covariates.cols() != model.coefficients.size()) {
    throw Error(ErrorCode::DimensionMismatch, "model has " + std::to_string(model.coefficients.size()) +
                                                  " coefficients, covariates have " +
                                                  std::to_string(covariates.cols()) + " columns");
  }
  return ((covariates * model.coefficients).array() + model.intercept).matrix();
}

Vector predict_pi(const PropensityModel& model, const Matrix& covariates) {
  if (covariates.cols() != model.coefficients.size()) {
    throw Error(ErrorCode::DimensionMismatch, "propensity model and covariates disagree in width");
  }
  const Vector eta = ((covariates * model.coefficients).array() + model.intercept).matrix();
  Vector pi(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double v = std::isnan(eta(i)) ? 0.5 : expit(eta(i));
    pi(i) = std::clamp(v, model.floor, 1.0 - model.floor);
  }
  return pi;
}

OutcomeModel fit_diff_in_means(const Vector& y, std::span<const std::uint8_t> a) {
  if (static_cast<Eigen::Index>(a.size()) != y.size()) throw Error(ErrorCode::DimensionMismatch, "a length differs");
  double sum1 = 0.0, sum0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (a[static_cast<std::size_t>(i)]) {
      sum1 += y(i);
      ++n1;
    } else {
      sum0 += y(i);
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) throw Error(ErrorCode::EmptyArm, "difference in means needs both arms");
  return OutcomeModel::diff_in_means(sum1 / static_cast<double>(n1), sum0 / static_cast<double>(n0));
}

Vector hajek_rescale(const Vector& pi_tilde, std::span<const std::uint8_t> a, double eps) {
  const Eigen::Index n = pi_tilde.size();
  if (static_cast<Eigen::Index>(a.size()) != n) throw Error(ErrorCode::DimensionMismatch, "a length differs");
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 0.5)");
  double sum1 = 0.0, sum0 = 0.0;
  std::size_t n1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = pi_tilde(i);
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "pi_tilde must lie in (0, 1)");
    if (a[static_cast<std::size_t>(i)]) {
      sum1 += 1.0 / p;
      ++n1;
    } else {
      sum0 += 1.0 / (1.0 - p);
    }
  }
  if (n1 == 0 || n1 == static_cast<std::size_t>(n)) throw Error(ErrorCode::EmptyArm, "both arms must be nonempty");
  const double factor1 = sum1 / static_cast<double>(n);
  const double factor0 = sum0 / static_cast<double>(n);

  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = pi_tilde(i);
    const double v = a[static_cast<std::size_t>(i)] ? p * factor1 : 1.0 - (1.0 - p) * factor0;
    out(i) = std::clamp(v, eps, 1.0 - eps);
  }
  return out;
}

}  // namespace dracc
