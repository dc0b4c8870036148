#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "dracc/data.hpp"
#include "dracc/rng.hpp"

namespace dracc::sim {

/// Population mean of the simulated outcome.
inline constexpr double kThetaStar = 210.0;

enum class Spec { Correct, Incorrect };

std::string_view to_string(Spec spec) noexcept;

struct ScenarioConfig {
  std::size_t n = 200;
  Spec outcome_spec = Spec::Correct;
  Spec propensity_spec = Spec::Correct;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when n < 20.
  void validate() const;
};

struct SimulatedSample {
  Matrix latent;    ///< T, n x 4
  Matrix observed;  ///< X = transform_covariates(T)
  Indicator response;
  MaskedOutcome outcome;
  Vector true_propensity;
  double theta_star = kThetaStar;

  std::size_t n() const noexcept { return response.size(); }
};

/// Which matrix a nuisance model is fit on. Correct specification uses the
/// latent T, incorrect uses the transformed X.
enum class Provenance { Latent, Observed };

struct DesignRef {
  const Matrix& values;
  Provenance provenance;
};

DesignRef design_for(const SimulatedSample& sample, Spec spec) noexcept;

/// n x 4 i.i.d. standard normals, filled row by row.
Matrix draw_latent(std::size_t n, Rng& rng);

/// 210 + 27.4 T1 + 13.7 (T2 + T3 + T4), without noise.
Vector outcome_mean(const Matrix& latent);

/// outcome_mean(T) + eps, eps ~ N(0, 1) drawn in row order.
Vector gen_outcome(const Matrix& latent, Rng& rng);

/// expit(-T1 + 0.5 T2 - 0.25 T3 - 0.1 T4).
Vector true_propensity(const Matrix& latent);

Matrix transform_covariates(const Matrix& latent);

/// Draws T, then the outcome noise, then R ~ Bernoulli(pi(T)), from one
/// stream seeded with `config.seed`. Throws DegenerateSample when every unit
/// has the same response; the caller decides what to do about it.
SimulatedSample generate(const ScenarioConfig& config);

}  // namespace dracc::sim
