#include "dracc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dracc/error.hpp"

namespace dracc {

double clip(double x, double a, double b) noexcept {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return std::max(lo, std::min(x, hi));
}

EstimateBundle combine(double theta_or, double theta_ipw, double correction, std::size_t n) {
  EstimateBundle out;
  out.theta_or = theta_or;
  out.theta_ipw = theta_ipw;
  out.correction = correction;
  out.n = n;
  out.theta_dr = theta_or + theta_ipw - correction;

  const double clipped = clip(correction, theta_or, theta_ipw);
  // The outer clip only absorbs rounding in OR + IPW - clipped, whose exact
  // value already lies between OR and IPW.
  out.theta_acc = clip(theta_or + theta_ipw - clipped, theta_or, theta_ipw);
  if (theta_or == theta_ipw) {
    out.lambda_hat = 1.0;
  } else {
    out.lambda_hat = std::clamp((theta_or - clipped) / (theta_or - theta_ipw), 0.0, 1.0);
  }
  return out;
}

EstimateBundle compute_bundle(const Vector& mu_hat, const Vector& pi_hat, std::span<const std::uint8_t> r,
                              const MaskedOutcome& y) {
  const auto n = static_cast<std::size_t>(mu_hat.size());
  if (static_cast<std::size_t>(pi_hat.size()) != n || r.size() != n || y.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "mu_hat, pi_hat, r and y must have equal length");
  }
  if (n == 0) throw Error(ErrorCode::NoData, "empty sample");

  double sum_mu = 0.0, sum_ipw = 0.0, sum_corr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sum_mu += mu_hat(k);
    if (!r[i]) continue;
    const double p = pi_hat(k);
    if (!(p > 0.0)) {
      throw Error(ErrorCode::NonPositivePropensity, "pi_hat[" + std::to_string(i) + "] = " + std::to_string(p));
    }
    sum_ipw += y.at(i) / p;
    sum_corr += mu_hat(k) / p;
  }
  const double nn = static_cast<double>(n);
  return combine(sum_mu / nn, sum_ipw / nn, sum_corr / nn, n);
}

std::string_view to_string(AteClipping mode) noexcept {
  return mode == AteClipping::PerArm ? "per-arm" : "difference";
}

ArmInputs arm_inputs(const AteDataset& data, const OutcomeModel& mu, const Vector& pi_hat, bool treated_arm) {
  const std::size_t n = data.n();
  if (static_cast<std::size_t>(pi_hat.size()) != n) throw Error(ErrorCode::DimensionMismatch, "pi_hat length");
  ArmInputs in;
  in.response.resize(n);
  for (std::size_t i = 0; i < n; ++i) in.response[i] = treated_arm ? data.treatment()[i] : 1 - data.treatment()[i];
  in.outcome = MaskedOutcome::masked_by(std::span<const double>(data.outcome().data(), n), in.response);
  const Indicator everyone(n, treated_arm ? 1 : 0);
  in.mu_hat = predict_mu(mu, data.covariates(), everyone);
  in.pi_hat = treated_arm ? pi_hat : Vector((1.0 - pi_hat.array()).matrix());
  return in;
}

AteEstimate estimate_ate(const AteDataset& data, const OutcomeModel& mu1, const OutcomeModel& mu0,
                         const Vector& pi_hat, AteClipping clipping) {
  // AteDataset construction already guarantees both arms are nonempty.
  const ArmInputs treated = arm_inputs(data, mu1, pi_hat, true);
  const ArmInputs control = arm_inputs(data, mu0, pi_hat, false);

  AteEstimate out;
  out.clipping = clipping;
  out.arm1 = compute_bundle(treated.mu_hat, treated.pi_hat, treated.response, treated.outcome);
  out.arm0 = compute_bundle(control.mu_hat, control.pi_hat, control.response, control.outcome);
  out.ate_or = out.arm1.theta_or - out.arm0.theta_or;
  out.ate_ipw = out.arm1.theta_ipw - out.arm0.theta_ipw;
  out.ate_dr = out.arm1.theta_dr - out.arm0.theta_dr;
  if (clipping == AteClipping::PerArm) {
    out.ate_acc = out.arm1.theta_acc - out.arm0.theta_acc;
  } else {
    const double corr = out.arm1.correction - out.arm0.correction;
    const double clipped = clip(corr, out.ate_or, out.ate_ipw);
    out.ate_acc = clip(out.ate_or + out.ate_ipw - clipped, out.ate_or, out.ate_ipw);
  }
  return out;
}

}  // namespace dracc
