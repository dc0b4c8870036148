#include "dracc/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "dracc/csv.hpp"
#include "dracc/error.hpp"
#include "dracc/nuisance.hpp"

namespace dracc {

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::OR: return "OR";
    case Estimator::IPW: return "IPW";
    case Estimator::DR: return "DR";
    case Estimator::ACC: return "DR+ACC";
  }
  return "?";
}

double estimate_of(const EstimateBundle& bundle, Estimator e) noexcept {
  switch (e) {
    case Estimator::OR: return bundle.theta_or;
    case Estimator::IPW: return bundle.theta_ipw;
    case Estimator::DR: return bundle.theta_dr;
    case Estimator::ACC: return bundle.theta_acc;
  }
  return 0.0;
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t n, std::size_t rep) noexcept {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

std::uint64_t bootstrap_seed(std::uint64_t seed, const Scenario& scenario) noexcept {
  return derive_seed(seed, {0xB007ULL, static_cast<std::uint64_t>(scenario.index())});
}

ScenarioFit fit_scenario(const sim::SimulatedSample& sample, const Scenario& scenario, const StudyConfig& config,
                         Rng& bootstrap_rng) {
  const auto mu_design = sim::design_for(sample, scenario.outcome);
  const auto pi_design = sim::design_for(sample, scenario.propensity);

  // Outcome regression on labeled rows only.
  const Matrix labeled = select_rows(mu_design.values, sample.response);
  Vector y_labeled(labeled.rows());
  for (std::size_t i = 0, k = 0; i < sample.n(); ++i) {
    if (sample.response[i]) y_labeled(static_cast<Eigen::Index>(k++)) = sample.outcome.at(i);
  }
  const OutcomeModel mu = fit_ols(labeled, y_labeled);
  const PropensityModel pi = fit_logistic(pi_design.values, sample.response, config.nuisance);

  const Vector mu_hat = predict_mu(mu, mu_design.values);
  const Vector pi_hat = predict_pi(pi, pi_design.values);

  ScenarioFit fit;
  fit.bundle = compute_bundle(mu_hat, pi_hat, sample.response, sample.outcome);
  fit.influence = influence_matrix(mu_hat, pi_hat, sample.response, sample.outcome, fit.bundle);
  fit.sigma = covariance(fit.influence);

  const double alpha = config.alpha;
  const std::size_t n = sample.n();
  const auto& phi = fit.influence.values;
  fit.intervals[0] = wald_interval_from_variance(fit.bundle.theta_or, fit.sigma.sigma(0, 0), n, alpha);
  fit.intervals[1] = wald_interval_from_variance(fit.bundle.theta_ipw, fit.sigma.sigma(1, 1), n, alpha);
  fit.intervals[2] = wald_interval(fit.bundle.theta_dr, Vector(phi.col(0) + phi.col(1) - phi.col(2)), alpha);
  fit.intervals[3] = acc_interval(fit.bundle, fit.sigma, config.bootstrap_b, alpha, bootstrap_rng);
  return fit;
}

bool audit_bundle(const EstimateBundle& b, double theta_star) noexcept {
  constexpr double tol = 1e-9;
  const double lo = std::min(b.theta_or, b.theta_ipw);
  const double hi = std::max(b.theta_or, b.theta_ipw);
  const bool inside = lo <= b.theta_acc && b.theta_acc <= hi;
  const bool safe = std::abs(b.theta_acc - theta_star) <=
                    std::max(std::abs(b.theta_or - theta_star), std::abs(b.theta_ipw - theta_star)) + tol;
  const bool convex = b.lambda_hat >= 0.0 && b.lambda_hat <= 1.0 &&
                      std::abs(b.theta_acc - (b.lambda_hat * b.theta_or + (1.0 - b.lambda_hat) * b.theta_ipw)) <= tol;
  return inside && safe && convex;
}

namespace {

struct WorkUnit {
  std::size_t size_index;
  std::size_t rep;
};

void run_unit(const StudyConfig& config, const WorkUnit& unit, std::vector<ReplicationRecord>& records) {
  const std::size_t n = config.sample_sizes[unit.size_index];
  const std::size_t reps = config.replications;
  const std::size_t n_scen = config.scenarios.size();
  auto slot = [&](std::size_t s) -> ReplicationRecord& {
    return records[(unit.size_index * n_scen + s) * reps + unit.rep];
  };
  for (std::size_t s = 0; s < n_scen; ++s) {
    auto& rec = slot(s);
    rec.n = n;
    rec.scenario = config.scenarios[s];
    rec.replication = unit.rep;
  }

  const std::uint64_t seed = sample_seed(config.master_seed, n, unit.rep);
  sim::SimulatedSample sample;
  try {
    sample = sim::generate({n, sim::Spec::Correct, sim::Spec::Correct, seed});
  } catch (const Error& e) {
    for (std::size_t s = 0; s < n_scen; ++s) {
      slot(s).flagged = true;
      slot(s).error = std::string(to_string(e.code()));
    }
    return;
  }

  for (std::size_t s = 0; s < n_scen; ++s) {
    auto& rec = slot(s);
    try {
      Rng rng = make_rng(bootstrap_seed(seed, rec.scenario));
      const ScenarioFit fit = fit_scenario(sample, rec.scenario, config, rng);
      rec.bundle = fit.bundle;
      rec.intervals = fit.intervals;
      rec.audit_ok = audit_bundle(fit.bundle, sample.theta_star);
    } catch (const Error& e) {
      rec.flagged = true;
      rec.error = std::string(to_string(e.code()));
    } catch (const std::exception& e) {
      rec.flagged = true;
      rec.error = "Exception";
    }
  }
}

}  // namespace

std::vector<ReplicationRecord> run_study(const StudyConfig& config) {
  config.validate();
  const std::size_t n_sizes = config.sample_sizes.size();
  std::vector<ReplicationRecord> records(n_sizes * config.scenarios.size() * config.replications);

  std::vector<WorkUnit> units;
  units.reserve(n_sizes * config.replications);
  for (std::size_t k = 0; k < n_sizes; ++k) {
    for (std::size_t r = 0; r < config.replications; ++r) units.push_back({k, r});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < units.size(); i = next.fetch_add(1)) run_unit(config, units[i], records);
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(config.effective_workers(),
                                                             static_cast<unsigned>(units.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  return records;
}

std::string records_csv(const std::vector<ReplicationRecord>& records) {
  std::ostringstream out;
  out << "n,scenario,replication,theta_or,theta_ipw,correction,theta_dr,theta_acc,lambda_hat,"
         "or_lo,or_hi,ipw_lo,ipw_hi,dr_lo,dr_hi,acc_lo,acc_hi,flagged,error\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.scenario.id() << ',' << r.replication;
    if (r.flagged) {
      for (int k = 0; k < 14; ++k) out << ',';
      out << ",1," << r.error << '\n';
      continue;
    }
    const auto& b = r.bundle;
    for (double v : {b.theta_or, b.theta_ipw, b.correction, b.theta_dr, b.theta_acc, b.lambda_hat}) {
      out << ',' << csv::format_number(v);
    }
    for (const auto& iv : r.intervals) out << ',' << csv::format_number(iv.lo) << ',' << csv::format_number(iv.hi);
    out << ",0,\n";
  }
  return out.str();
}

void write_records_csv(const std::filesystem::path& path, const std::vector<ReplicationRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << records_csv(records);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

LimitLawSample limit_law_sample(const StudyConfig& config, std::size_t n, const Scenario& scenario, std::size_t rep) {
  const std::uint64_t seed = sample_seed(config.master_seed, n, rep);
  const auto sample = sim::generate({n, sim::Spec::Correct, sim::Spec::Correct, seed});
  Rng rng = make_rng(bootstrap_seed(seed, scenario));
  const ScenarioFit fit = fit_scenario(sample, scenario, config, rng);

  Rng draw_rng = make_rng(derive_seed(seed, {0x11A7ULL, scenario.index()}));
  LimitLawSample out;
  out.draws = sample_W(fit.sigma, config.bootstrap_b, draw_rng);
  const Eigen::Vector3d a(1.0, 1.0, -1.0);
  out.gaussian_sd = std::sqrt(std::max(0.0, a.dot(fit.sigma.sigma * a)));
  return out;
}

}  // namespace dracc
