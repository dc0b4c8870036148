#include "dracc/ate_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "dracc/csv.hpp"
#include "dracc/error.hpp"

namespace dracc {
namespace {

struct ArmFit {
  ArmInputs inputs;
  InfluenceMatrix influence;
  CovMatrix3 sigma;
};

ArmFit fit_arm(const AteDataset& data, const OutcomeModel& mu, const Vector& pi_hat, const EstimateBundle& bundle,
               bool treated) {
  ArmFit fit{arm_inputs(data, mu, pi_hat, treated), {}, {}};
  fit.influence = influence_matrix(fit.inputs.mu_hat, fit.inputs.pi_hat, fit.inputs.response, fit.inputs.outcome,
                                   bundle);
  fit.sigma = covariance(fit.influence);
  return fit;
}

// Gaussian component draws (Z_OR, Z_IPW, Z_corr), one row per draw.
Eigen::Matrix<double, Eigen::Dynamic, 3> draw_components(const CovMatrix3& sigma, std::size_t b, Rng& rng) {
  const Eigen::Matrix3d l = covariance_factor(sigma);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<double, Eigen::Dynamic, 3> z(static_cast<Eigen::Index>(b), 3);
  for (Eigen::Index k = 0; k < z.rows(); ++k) {
    Eigen::Vector3d g;
    g(0) = normal(rng);
    g(1) = normal(rng);
    g(2) = normal(rng);
    z.row(k) = (l * g).transpose();
  }
  return z;
}

bool excludes_zero(const Interval& iv, double slack) { return iv.lo > slack || iv.hi < -slack; }

AteOutcomeResult analyze_one(const AteDataset& data, const Vector& pi_hat, const AteConfig& config, Rng& rng) {
  AteOutcomeResult res;
  res.name = data.name();
  const OutcomeModel mu = fit_diff_in_means(data.outcome(), data.treatment());
  res.estimate = estimate_ate(data, mu, mu, pi_hat, config.clipping);
  const auto& est = res.estimate;

  const ArmFit arm1 = fit_arm(data, mu, pi_hat, est.arm1, true);
  const ArmFit arm0 = fit_arm(data, mu, pi_hat, est.arm0, false);
  const std::size_t n = data.n();
  const double alpha = config.alpha;

  auto wald = [&](double theta, const Vector& phi1, const Vector& phi0) {
    return wald_interval_from_variance(theta, influence_variance(phi1) + influence_variance(phi0), n, alpha);
  };
  res.intervals[0] = wald(est.ate_or, arm1.influence.values.col(0), arm0.influence.values.col(0));
  res.intervals[1] = wald(est.ate_ipw, arm1.influence.values.col(1), arm0.influence.values.col(1));
  res.intervals[2] = wald(est.ate_dr, arm1.influence.dr_column(), arm0.influence.dr_column());

  const auto z1 = draw_components(arm1.sigma, config.bootstrap_b, rng);
  const auto z0 = draw_components(arm0.sigma, config.bootstrap_b, rng);
  std::vector<double> w1(config.bootstrap_b), w0(config.bootstrap_b), w_ate(config.bootstrap_b);
  for (std::size_t b = 0; b < config.bootstrap_b; ++b) {
    const auto k = static_cast<Eigen::Index>(b);
    w1[b] = clipped_limit(z1(k, 0), z1(k, 1), z1(k, 2));
    w0[b] = clipped_limit(z0(k, 0), z0(k, 1), z0(k, 2));
    if (config.clipping == AteClipping::PerArm) {
      w_ate[b] = w1[b] - w0[b];
    } else {
      w_ate[b] = clipped_limit(z1(k, 0) - z0(k, 0), z1(k, 1) - z0(k, 1), z1(k, 2) - z0(k, 2));
    }
  }
  res.acc_arm1 = bootstrap_interval(est.arm1.theta_acc, n, w1, alpha);
  res.acc_arm0 = bootstrap_interval(est.arm0.theta_acc, n, w0, alpha);
  if (config.ci_mode == AteCiMode::SumArms) {
    res.intervals[3] = bootstrap_interval(est.ate_acc, n, w_ate, alpha);
  } else {
    res.intervals[3] = Interval{res.acc_arm1.lo - res.acc_arm0.hi, res.acc_arm1.hi - res.acc_arm0.lo, 1.0 - alpha,
                                IntervalMethod::ParametricBootstrap};
  }

  const double slack = 1e-10 * (1.0 + data.outcome().cwiseAbs().maxCoeff());
  for (std::size_t e = 0; e < 4; ++e) res.significant[e] = excludes_zero(res.intervals[e], slack);
  res.ok = true;
  return res;
}

std::string fmt(double v) { return csv::format_number(v); }

}  // namespace

std::string_view to_string(AteCiMode mode) noexcept {
  return mode == AteCiMode::SumArms ? "sum-arms" : "per-arm-report";
}

AteCiMode parse_ate_ci_mode(std::string_view text) {
  if (text == "sum-arms") return AteCiMode::SumArms;
  if (text == "per-arm-report") return AteCiMode::PerArmReport;
  throw Error(ErrorCode::ConfigError, "unknown ATE CI mode '" + std::string(text) + "'");
}

AteClipping parse_ate_clipping(std::string_view text) {
  if (text == "per-arm") return AteClipping::PerArm;
  if (text == "difference") return AteClipping::Difference;
  throw Error(ErrorCode::ConfigError, "unknown ATE clipping mode '" + std::string(text) + "'");
}

AteReport analyze_ate(const std::vector<AteDataset>& outcomes, const AteConfig& config) {
  if (outcomes.empty()) throw Error(ErrorCode::NoData, "no outcome columns");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(ErrorCode::ConfigError, "alpha must lie in (0, 1)");
  if (config.bootstrap_b < 1000) throw Error(ErrorCode::ConfigError, "bootstrap draws must be at least 1000");
  if (!(config.eps > 0.0 && config.eps < 0.5)) throw Error(ErrorCode::ConfigError, "eps must lie in (0, 0.5)");

  const AteDataset& first = outcomes.front();
  AteReport report;
  report.config = config;
  report.n = first.n();
  report.n_treated = first.treated_count();

  LogisticOptions logistic = config.logistic;
  logistic.floor = config.eps;
  report.propensity = fit_logistic(first.covariates(), first.treatment(), logistic);
  const Vector pi_tilde = predict_pi(report.propensity, first.covariates());
  const Vector pi_hat = hajek_rescale(pi_tilde, first.treatment(), config.eps);

  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const AteDataset& data = outcomes[k];
    Rng rng = make_rng(derive_seed(config.seed, {static_cast<std::uint64_t>(k)}));
    AteOutcomeResult res;
    try {
      if (data.shared_covariates() != first.shared_covariates() &&
          (data.n() != first.n() || data.covariates() != first.covariates())) {
        throw Error(ErrorCode::DimensionMismatch, "outcome does not share the study covariates");
      }
      if (data.treatment() != first.treatment()) {
        throw Error(ErrorCode::DimensionMismatch, "outcome does not share the study treatment");
      }
      res = analyze_one(data, pi_hat, config, rng);
    } catch (const Error& e) {
      res.name = data.name();
      res.ok = false;
      res.error = e.what();
    }
    if (res.ok) {
      for (std::size_t e = 0; e < 4; ++e) report.significant_counts[e] += res.significant[e] ? 1 : 0;
    }
    report.outcomes.push_back(std::move(res));
  }
  return report;
}

AteReport analyze_ate(const std::filesystem::path& path, const AteSchema& schema,
                      const std::vector<std::string>& outcome_columns, const AteConfig& config) {
  return analyze_ate(load_ate_csv(path, schema, outcome_columns), config);
}

std::string ate_results_csv(const AteReport& report) {
  std::ostringstream out;
  out << "outcome,ok,ate_or,ate_ipw,ate_dr,ate_acc,"
         "or_lo,or_hi,ipw_lo,ipw_hi,dr_lo,dr_hi,acc_lo,acc_hi,"
         "sig_or,sig_ipw,sig_dr,sig_acc,"
         "arm1_or,arm1_ipw,arm1_correction,arm1_dr,arm1_acc,arm1_lambda,"
         "arm0_or,arm0_ipw,arm0_correction,arm0_dr,arm0_acc,arm0_lambda,"
         "acc_arm1_lo,acc_arm1_hi,acc_arm0_lo,acc_arm0_hi,error\n";
  for (const auto& r : report.outcomes) {
    out << csv::quote_if_needed(r.name) << ',' << (r.ok ? 1 : 0);
    if (!r.ok) {
      for (int k = 0; k < 32; ++k) out << ',';
      out << ',' << csv::quote_if_needed(r.error) << '\n';
      continue;
    }
    const auto& e = r.estimate;
    for (double v : {e.ate_or, e.ate_ipw, e.ate_dr, e.ate_acc}) out << ',' << fmt(v);
    for (const auto& iv : r.intervals) out << ',' << fmt(iv.lo) << ',' << fmt(iv.hi);
    for (bool s : r.significant) out << ',' << (s ? 1 : 0);
    for (const auto* b : {&e.arm1, &e.arm0}) {
      for (double v : {b->theta_or, b->theta_ipw, b->correction, b->theta_dr, b->theta_acc, b->lambda_hat}) {
        out << ',' << fmt(v);
      }
    }
    out << ',' << fmt(r.acc_arm1.lo) << ',' << fmt(r.acc_arm1.hi) << ',' << fmt(r.acc_arm0.lo) << ','
        << fmt(r.acc_arm0.hi) << ",\n";
  }
  return out.str();
}

std::string ate_summary_markdown(const AteReport& report) {
  std::ostringstream out;
  std::size_t failed = 0, outside = 0;
  for (const auto& r : report.outcomes) {
    if (!r.ok) {
      ++failed;
      continue;
    }
    const double lo = std::min(r.estimate.ate_or, r.estimate.ate_ipw);
    const double hi = std::max(r.estimate.ate_or, r.estimate.ate_ipw);
    if (r.estimate.ate_dr < lo || r.estimate.ate_dr > hi) ++outside;
  }
  char alpha[32];
  std::snprintf(alpha, sizeof alpha, "%g", report.config.alpha);
  out << "# Treatment effect analysis\n\n";
  out << "- units: " << report.n << " (" << report.n_treated << " treated)\n";
  out << "- outcomes analysed: " << report.outcomes.size() - failed << " of " << report.outcomes.size() << '\n';
  out << "- significance level: " << alpha << " (no multiple-testing correction)\n";
  out << "- DR+ACC clipping: " << to_string(report.config.clipping)
      << ", interval mode: " << to_string(report.config.ci_mode) << '\n';
  out << "- outcomes where DR falls outside [OR, IPW]: " << outside << "\n\n";
  out << "| Estimator | Interval | Significant |\n|---|---|---:|\n";
  for (Estimator e : kEstimators) {
    out << "| " << to_string(e) << " | " << (e == Estimator::ACC ? "parametric bootstrap" : "Wald") << " | "
        << report.significant_counts[static_cast<std::size_t>(e)] << " |\n";
  }
  std::size_t acc_only = 0;
  for (const auto& r : report.outcomes) {
    if (r.ok && r.significant[3] && !r.significant[2]) ++acc_only;
  }
  out << "\nSignificant under DR+ACC but not DR: " << acc_only << '\n';
  out << "\nOR intervals have zero width: the difference-in-means outcome model has an identically zero "
         "influence column, so OR significance only reflects a nonzero point estimate.\n";
  if (failed > 0) {
    out << "\n## Failed outcomes\n\n";
    for (const auto& r : report.outcomes) {
      if (!r.ok) out << "- " << r.name << ": " << r.error << '\n';
    }
  }
  return out.str();
}

}  // namespace dracc
