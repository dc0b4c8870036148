#include "dracc/simgen.hpp"

#include <cmath>
#include <vector>

#include "dracc/error.hpp"

namespace dracc::sim {

std::string_view to_string(Spec spec) noexcept { return spec == Spec::Correct ? "correct" : "incorrect"; }

void ScenarioConfig::validate() const {
  if (n < 20) throw Error(ErrorCode::InvalidArgument, "scenario sample size must be at least 20");
}

DesignRef design_for(const SimulatedSample& sample, Spec spec) noexcept {
  if (spec == Spec::Correct) return {sample.latent, Provenance::Latent};
  return {sample.observed, Provenance::Observed};
}

Matrix draw_latent(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix t(static_cast<Eigen::Index>(n), 4);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) t(i, j) = normal(rng);
  }
  return t;
}

Vector outcome_mean(const Matrix& latent) {
  return (210.0 + 27.4 * latent.col(0).array() +
          13.7 * (latent.col(1).array() + latent.col(2).array() + latent.col(3).array()))
      .matrix();
}

Vector gen_outcome(const Matrix& latent, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y = outcome_mean(latent);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += normal(rng);
  return y;
}

Vector true_propensity(const Matrix& latent) {
  Vector pi(latent.rows());
  for (Eigen::Index i = 0; i < latent.rows(); ++i) {
    const double eta = -latent(i, 0) + 0.5 * latent(i, 1) - 0.25 * latent(i, 2) - 0.1 * latent(i, 3);
    pi(i) = 1.0 / (1.0 + std::exp(-eta));
  }
  return pi;
}

Matrix transform_covariates(const Matrix& latent) {
  Matrix x(latent.rows(), 4);
  for (Eigen::Index i = 0; i < latent.rows(); ++i) {
    const double t1 = latent(i, 0), t2 = latent(i, 1), t3 = latent(i, 2), t4 = latent(i, 3);
    x(i, 0) = std::exp(t1 / 2.0);
    x(i, 1) = t2 / (1.0 + std::exp(t1)) + 10.0;
    x(i, 2) = std::pow(t1 * t3 / 25.0 + 0.6, 3);
    x(i, 3) = std::pow(t2 + t4 + 20.0, 2);
  }
  return x;
}

SimulatedSample generate(const ScenarioConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed);

  SimulatedSample s;
  s.latent = draw_latent(config.n, rng);
  const Vector y = gen_outcome(s.latent, rng);
  s.true_propensity = true_propensity(s.latent);
  s.observed = transform_covariates(s.latent);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  s.response.resize(config.n);
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < config.n; ++i) {
    s.response[i] = unif(rng) < s.true_propensity(static_cast<Eigen::Index>(i)) ? 1 : 0;
    labeled += s.response[i];
  }
  s.outcome = MaskedOutcome::masked_by(std::span<const double>(y.data(), config.n), s.response);
  if (labeled == 0 || labeled == config.n) {
    throw Error(ErrorCode::DegenerateSample, "all units share the same response indicator");
  }
  return s;
}

}  // namespace dracc::sim
