#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "dracc/data.hpp"
#include "dracc/nuisance.hpp"

namespace dracc {

/// Projects x onto the closed interval spanned by a and b (either order).
double clip(double x, double a, double b) noexcept;

/// The four point estimates for one sample plus the ingredients that tie them
/// together: DR = OR + IPW - correction, and ACC replaces the correction by
/// its projection onto [min(OR, IPW), max(OR, IPW)].
struct EstimateBundle {
  double theta_or = 0.0;
  double theta_ipw = 0.0;
  double correction = 0.0;
  double theta_dr = 0.0;
  double theta_acc = 0.0;
  double lambda_hat = 1.0;  ///< ACC = lambda * OR + (1 - lambda) * IPW
  std::size_t n = 0;

  double clipped_correction() const noexcept { return clip(correction, theta_or, theta_ipw); }
};

/// Combines the three sample means into the bundle. When OR == IPW the
/// lambda ratio is 0/0 and lambda is set to 1.
EstimateBundle combine(double theta_or, double theta_ipw, double correction, std::size_t n);

/// OR = mean mu_i, IPW = mean R_i Y_i / pi_i, correction = mean R_i mu_i / pi_i.
/// Only R = 1 outcome cells are read.
EstimateBundle compute_bundle(const Vector& mu_hat, const Vector& pi_hat, std::span<const std::uint8_t> r,
                              const MaskedOutcome& y);

/// How the two arms are combined into DR+ACC for a treatment effect.
enum class AteClipping {
  PerArm,      ///< clip each arm mean's correction, then difference
  Difference,  ///< difference the components, then clip the differenced correction
};

std::string_view to_string(AteClipping mode) noexcept;

struct AteEstimate {
  EstimateBundle arm1;
  EstimateBundle arm0;
  double ate_or = 0.0;
  double ate_ipw = 0.0;
  double ate_dr = 0.0;
  double ate_acc = 0.0;
  AteClipping clipping = AteClipping::PerArm;
};

/// Per-arm inputs derived from an ATE dataset: the arm's response indicator,
/// its outcome masked to that arm, mu evaluated with every unit assigned to
/// the arm, and the arm's propensity (pi for treated, 1 - pi for control).
struct ArmInputs {
  Indicator response;
  MaskedOutcome outcome;
  Vector mu_hat;
  Vector pi_hat;
};

ArmInputs arm_inputs(const AteDataset& data, const OutcomeModel& mu, const Vector& pi_hat, bool treated_arm);

/// Treated arm uses R := A with propensity pi; control arm uses R := 1 - A
/// with propensity 1 - pi.
AteEstimate estimate_ate(const AteDataset& data, const OutcomeModel& mu1, const OutcomeModel& mu0,
                         const Vector& pi_hat, AteClipping clipping = AteClipping::PerArm);

}  // namespace dracc
