// dracc: Monte Carlo study and two-arm treatment effect analysis for the
// doubly robust estimator with adaptive correction clipping.
//
//   dracc simulate --config study.cfg --out results/
//   dracc analyze --data peptides.csv --treatment ad --covariates region,pmi,age,sex --outcomes all
//
// Exit status: 0 success, 1 configuration or input error, 2 I/O error.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dracc/dracc.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

std::string file_tag(dracc::Estimator e) {
  switch (e) {
    case dracc::Estimator::OR: return "or";
    case dracc::Estimator::IPW: return "ipw";
    case dracc::Estimator::DR: return "dr";
    case dracc::Estimator::ACC: return "acc";
  }
  return "x";
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else if (c != ' ') {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw dracc::Error(dracc::ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

struct SimulateArgs {
  std::string config_path;
  std::vector<std::size_t> sizes;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t b = 0;
  double alpha = 0.0;
  int workers = -1;
  std::string scenarios;
  std::string out = "dracc-out";
  std::size_t bins = 30;
  bool plots = true;
};

void write_study_plots(const dracc::StudyConfig& config, const std::vector<dracc::ReplicationRecord>& records,
                       const fs::path& out, std::size_t bins) {
  using dracc::Estimator;
  for (std::size_t n : config.sample_sizes) {
    for (const auto& scenario : config.scenarios) {
      std::array<std::vector<double>, 4> values;
      for (const auto& r : records) {
        if (r.n != n || !(r.scenario == scenario) || r.flagged) continue;
        for (Estimator e : dracc::kEstimators) {
          values[static_cast<std::size_t>(e)].push_back(dracc::estimate_of(r.bundle, e));
        }
      }
      const std::string stem = "n" + std::to_string(n) + "_" + scenario.id();
      for (Estimator e : dracc::kEstimators) {
        const auto& v = values[static_cast<std::size_t>(e)];
        if (v.size() < 2) continue;
        const std::string title = std::string(dracc::to_string(e)) + ", n = " + std::to_string(n) + ", " +
                                  scenario.label();
        dracc::plot::emit_histogram_svg(v, bins, dracc::sim::kThetaStar, out / ("hist_" + stem + "_" + file_tag(e) + ".svg"),
                                        out / ("hist_" + stem + "_" + file_tag(e) + ".csv"), title);
      }
      const auto& acc = values[static_cast<std::size_t>(Estimator::ACC)];
      for (Estimator e : {Estimator::OR, Estimator::IPW, Estimator::DR}) {
        const auto& x = values[static_cast<std::size_t>(e)];
        if (x.size() < 2) continue;
        dracc::write_text_file(out / ("scatter_" + stem + "_acc_vs_" + file_tag(e) + ".svg"),
                               dracc::plot::scatter_svg(x, acc, dracc::to_string(e), "DR+ACC",
                                                        "DR+ACC vs " + std::string(dracc::to_string(e)) + ", n = " +
                                                            std::to_string(n) + ", " + scenario.label()));
      }
    }
    const dracc::Scenario well_specified{};
    try {
      const auto law = dracc::limit_law_sample(config, n, well_specified, 0);
      dracc::write_text_file(out / ("w_vs_gaussian_n" + std::to_string(n) + ".svg"),
                             dracc::plot::density_overlay_svg(law.draws, 60, law.gaussian_sd,
                                                              "Limit law W vs Gaussian, n = " + std::to_string(n)));
    } catch (const dracc::Error& e) {
      if (e.code() == dracc::ErrorCode::IoError) throw;
      std::cerr << "warning: no W overlay for n = " << n << ": " << e.what() << '\n';
    }
  }
}

int run_simulate(const SimulateArgs& args) {
  dracc::StudyConfig config =
      args.config_path.empty() ? dracc::StudyConfig{} : dracc::load_study_config(args.config_path);
  if (!args.sizes.empty()) config.sample_sizes = args.sizes;
  if (args.reps > 0) config.replications = args.reps;
  if (args.seed_set) config.master_seed = args.seed;
  if (args.b > 0) config.bootstrap_b = args.b;
  if (args.alpha > 0.0) config.alpha = args.alpha;
  if (args.workers >= 0) config.workers = static_cast<unsigned>(args.workers);
  if (!args.scenarios.empty()) config.apply("scenarios", args.scenarios);
  config.validate();

  const fs::path out(args.out);
  ensure_dir(out);

  const auto start = std::chrono::steady_clock::now();
  const auto records = dracc::run_study(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::size_t flagged = 0, audit_failures = 0;
  for (const auto& r : records) {
    flagged += r.flagged ? 1 : 0;
    audit_failures += (!r.flagged && !r.audit_ok) ? 1 : 0;
  }

  dracc::write_records_csv(out / "records.csv", records);
  const auto table = dracc::compute_metrics(records, dracc::sim::kThetaStar);
  dracc::emit_report(table, dracc::ReportFormat::Csv, out / "metrics.csv");
  dracc::emit_report(table, dracc::ReportFormat::Markdown, out / "metrics.md");
  if (args.plots) write_study_plots(config, records, out, args.bins);

  std::cout << dracc::render_report(table, dracc::ReportFormat::Markdown) << '\n';
  std::printf("%zu records in %.1f s with %u worker(s); %zu flagged, %zu audit failures\n", records.size(), seconds,
              config.effective_workers(), flagged, audit_failures);
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

struct AnalyzeArgs {
  std::string data;
  std::string treatment;
  std::string covariates;
  std::string outcomes = "all";
  double alpha = 0.05;
  std::size_t b = dracc::kDefaultBootstrapDraws;
  double eps = 0.01;
  std::uint64_t seed = 20240917;
  std::string ate_ci = "sum-arms";
  std::string ate_clip = "per-arm";
  std::string out = "dracc-ate";
  std::size_t bins = 30;
};

int run_analyze(const AnalyzeArgs& args) {
  dracc::AteConfig config;
  config.alpha = args.alpha;
  config.bootstrap_b = args.b;
  config.eps = args.eps;
  config.seed = args.seed;
  config.ci_mode = dracc::parse_ate_ci_mode(args.ate_ci);
  config.clipping = dracc::parse_ate_clipping(args.ate_clip);

  dracc::AteSchema schema{split_names(args.covariates), args.treatment};
  std::vector<std::string> outcomes =
      args.outcomes == "all" ? dracc::remaining_columns(args.data, schema) : split_names(args.outcomes);
  if (outcomes.empty()) throw dracc::Error(dracc::ErrorCode::ConfigError, "no outcome columns selected");

  const auto report = dracc::analyze_ate(args.data, schema, outcomes, config);

  const fs::path out(args.out);
  ensure_dir(out);
  dracc::write_text_file(out / "ate_results.csv", dracc::ate_results_csv(report));
  const std::string summary = dracc::ate_summary_markdown(report);
  dracc::write_text_file(out / "ate_summary.md", summary);

  std::array<std::vector<double>, 4> values;
  std::vector<double> gap;
  for (const auto& r : report.outcomes) {
    if (!r.ok) continue;
    values[0].push_back(r.estimate.ate_or);
    values[1].push_back(r.estimate.ate_ipw);
    values[2].push_back(r.estimate.ate_dr);
    values[3].push_back(r.estimate.ate_acc);
    gap.push_back(r.estimate.ate_dr - r.estimate.ate_acc);
  }
  if (values[0].size() >= 2) {
    for (dracc::Estimator e : dracc::kEstimators) {
      const auto& v = values[static_cast<std::size_t>(e)];
      dracc::plot::emit_histogram_svg(v, args.bins, 0.0, out / ("ate_hist_" + file_tag(e) + ".svg"),
                                      out / ("ate_hist_" + file_tag(e) + ".csv"),
                                      "Estimated effects, " + std::string(dracc::to_string(e)));
    }
    dracc::plot::emit_histogram_svg(gap, args.bins, 0.0, out / "ate_hist_dr_minus_acc.svg",
                                    out / "ate_hist_dr_minus_acc.csv", "DR minus DR+ACC");
    dracc::write_text_file(out / "ate_scatter_acc_vs_dr.svg",
                           dracc::plot::scatter_svg(values[2], values[3], "DR", "DR+ACC", "DR+ACC vs DR"));
  }
  std::cout << summary << "wrote " << out.string() << '\n';
  return 0;
}

int exit_code_for(const dracc::Error& e) { return e.code() == dracc::ErrorCode::IoError ? kExitIo : kExitConfig; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly robust estimation with adaptive correction clipping"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the misspecification Monte Carlo study");
  simulate->add_option("--config", sim.config_path, "key = value study config file");
  simulate->add_option("--n", sim.sizes, "sample sizes (overrides sample_sizes)")->delimiter(',');
  simulate->add_option("--reps", sim.reps, "replications (overrides replications)");
  simulate->add_option("--seed", sim.seed, "master seed (overrides master_seed)")->each([&](const std::string&) {
    sim.seed_set = true;
  });
  simulate->add_option("--b", sim.b, "bootstrap draws (overrides inference.bootstrap_b)");
  simulate->add_option("--alpha", sim.alpha, "1 - confidence level (overrides inference.alpha)");
  simulate->add_option("--workers", sim.workers, "worker threads, 0 = available parallelism");
  simulate->add_option("--scenarios", sim.scenarios, "subset of cc,ci,ic,ii");
  simulate->add_option("--out", sim.out, "output directory")->capture_default_str();
  simulate->add_option("--bins", sim.bins, "histogram bins")->capture_default_str();
  simulate->add_flag("!--no-plots", sim.plots, "skip SVG and bin CSV output");
  std::string keys_help = "Config file keys:\n";
  for (const auto& [key, text] : dracc::study_config_keys()) keys_help += "  " + key + "  " + text + "\n";
  simulate->footer(keys_help);

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "Estimate treatment effects for every outcome column of a CSV");
  analyze->add_option("--data", ana.data, "input CSV")->required();
  analyze->add_option("--treatment", ana.treatment, "binary treatment column")->required();
  analyze->add_option("--covariates", ana.covariates, "comma separated propensity covariates");
  analyze->add_option("--outcomes", ana.outcomes, "comma separated outcome columns or 'all'")->capture_default_str();
  analyze->add_option("--alpha", ana.alpha, "significance level")->capture_default_str();
  analyze->add_option("--b", ana.b, "bootstrap draws")->capture_default_str();
  analyze->add_option("--eps", ana.eps, "propensity floor")->capture_default_str();
  analyze->add_option("--seed", ana.seed, "bootstrap seed")->capture_default_str();
  analyze->add_option("--ate-ci", ana.ate_ci, "sum-arms | per-arm-report")->capture_default_str();
  analyze->add_option("--ate-clip", ana.ate_clip, "per-arm | difference")->capture_default_str();
  analyze->add_option("--out", ana.out, "output directory")->capture_default_str();
  analyze->add_option("--bins", ana.bins, "histogram bins")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(sim);
    return run_analyze(ana);
  } catch (const dracc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
