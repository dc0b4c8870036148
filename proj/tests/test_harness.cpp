#include <cmath>
#include <map>
#include <random>
#include <regex>

#include "doctest.h"
#include "dracc/config.hpp"
#include "dracc/csv.hpp"
#include "dracc/error.hpp"
#include "dracc/metrics.hpp"
#include "dracc/plots.hpp"
#include "dracc/report.hpp"
#include "dracc/study.hpp"
#include "test_util.hpp"

using namespace dracc;
using doctest::Approx;
using dracc::test::TempDir;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected dracc::Error");
  return ErrorCode::InvalidArgument;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++count;
  return count;
}

Interval iv(double lo, double hi) { return Interval{lo, hi, 0.95, IntervalMethod::Wald}; }

StudyConfig small_study() {
  StudyConfig cfg;
  cfg.sample_sizes = {100, 200};
  cfg.replications = 6;
  cfg.bootstrap_b = 1000;
  cfg.master_seed = 99;
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST_CASE("scenarios") {
  const auto all = all_scenarios();
  REQUIRE(all.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(all[i].index() == i);
  CHECK(all[1].id() == "mu-correct_pi-incorrect");
  CHECK(all[2].label() == "Incorrect mu, Correct pi");
  CHECK(parse_scenario("ic") == all[2]);
  CHECK(parse_scenario("mu-incorrect_pi-incorrect") == all[3]);
  CHECK(code_of([] { parse_scenario("xx"); }) == ErrorCode::ConfigError);
}

TEST_CASE("study config parsing") {
  const auto cfg = parse_study_config(
      "# comment\n"
      "sample_sizes = 50, 80\n"
      "replications=12   # trailing\n"
      "scenarios = cc,ii\n"
      "master_seed = 18446744073709551615\n"
      "workers = 3\n"
      "inference.bootstrap_b = 2000\n"
      "inference.alpha = 0.1\n"
      "nuisance.tol = 1e-9\n"
      "nuisance.max_iter = 40\n"
      "nuisance.eps = 0.001\n");
  CHECK(cfg.sample_sizes == std::vector<std::size_t>{50, 80});
  CHECK(cfg.replications == 12);
  REQUIRE(cfg.scenarios.size() == 2);
  CHECK(cfg.scenarios[1].index() == 3);
  CHECK(cfg.master_seed == 18446744073709551615ULL);
  CHECK(cfg.workers == 3);
  CHECK(cfg.bootstrap_b == 2000);
  CHECK(cfg.alpha == 0.1);
  CHECK(cfg.nuisance.tol == 1e-9);
  CHECK(cfg.nuisance.max_iter == 40);
  CHECK(cfg.nuisance.floor == 0.001);
  CHECK_NOTHROW(cfg.validate());

  const StudyConfig defaults;
  CHECK(defaults.sample_sizes == std::vector<std::size_t>{100, 200, 1000});
  CHECK(defaults.replications == 1000);
  CHECK(defaults.bootstrap_b == 10000);
  CHECK(defaults.alpha == 0.05);
  CHECK(defaults.scenarios.size() == 4);
  CHECK(defaults.effective_workers() >= 1);

  CHECK(code_of([] { parse_study_config("bogus = 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_study_config("replications\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_study_config("replications = many\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_study_config("inference.alpha = 1.5\n").validate(); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_study_config("replications = 0\n").validate(); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_study_config("/nonexistent/dracc.cfg"); }) == ErrorCode::IoError);

  // every documented key is accepted
  const std::map<std::string, std::string> sample_value{
      {"sample_sizes", "100"},   {"replications", "5"},         {"scenarios", "all"},
      {"master_seed", "7"},      {"workers", "2"},              {"inference.bootstrap_b", "1000"},
      {"inference.alpha", "0.1"}, {"nuisance.tol", "1e-7"},     {"nuisance.max_iter", "50"},
      {"nuisance.eps", "0.01"}};
  CHECK(study_config_keys().size() == sample_value.size());
  for (const auto& [key, help] : study_config_keys()) {
    CHECK_FALSE(help.empty());
    REQUIRE(sample_value.count(key) == 1);
    StudyConfig c;
    CHECK_NOTHROW(c.apply(key, sample_value.at(key)));
  }
}

TEST_CASE("summarize examples") {
  const std::vector<double> pair{211, 209};
  const std::vector<Interval> two{iv(209, 211), iv(211, 212)};
  const auto m = summarize(pair, two, 210);
  CHECK(m.bias == 0);
  CHECK(m.rmse == 1);
  CHECK(m.mae == 1);
  CHECK(m.coverage == 0.5);
  // mean of hi - lo over widths 2 and 1
  CHECK(m.ci_width == 1.5);
  CHECK(m.count == 2);

  const std::vector<double> single{212};
  const std::vector<Interval> one{iv(209, 213)};
  const auto s = summarize(single, one, 210);
  CHECK(s.bias == 2);
  CHECK(s.rmse == 2);
  CHECK(s.mae == 2);
  CHECK(s.coverage == 1.0);

  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK(code_of([] { summarize({}, {}, 0); }) == ErrorCode::NoData);
  CHECK(code_of([] { compute_metrics({}, 210); }) == ErrorCode::NoData);
}

TEST_CASE("run_study: shape, determinism across runs and worker counts, audit") {
  auto cfg = small_study();
  const auto a = run_study(cfg);
  CHECK(a.size() == 2 * 4 * 6);
  cfg.workers = 8;
  const auto b = run_study(cfg);
  CHECK(records_csv(a) == records_csv(b));
  cfg.workers = 1;
  CHECK(records_csv(run_study(cfg)) == records_csv(a));

  for (const auto& r : a) {
    CHECK_FALSE(r.flagged);
    CHECK(r.audit_ok);
    CHECK(audit_bundle(r.bundle, 210.0));
    CHECK(r.intervals[0].method == IntervalMethod::Wald);
    CHECK(r.intervals[3].method == IntervalMethod::ParametricBootstrap);
    for (const auto& ci : r.intervals) CHECK(ci.lo <= ci.hi);
  }
  // scenarios share a sample: OR under a correct outcome model does not depend on the propensity spec
  CHECK(a[0].bundle.theta_or == a[6].bundle.theta_or);
  CHECK(a[0].n == 100);
  CHECK(a[0].scenario.index() == 0);
  CHECK(a[6].scenario.index() == 1);
  CHECK(a[7].replication == 1);

  const auto table = compute_metrics(a, 210.0);
  CHECK(table.size() == 2 * 4 * 4);
  for (const auto& row : table) {
    CHECK(row.rmse >= std::abs(row.bias) - 1e-12);
    CHECK(row.mae >= 0);
    CHECK(row.ci_width >= 0);
    CHECK(row.coverage >= 0);
    CHECK(row.coverage <= 1);
    CHECK(row.count == 6);
  }

  cfg.master_seed = 100;
  CHECK(records_csv(run_study(cfg)) != records_csv(a));
}

TEST_CASE("records csv layout") {
  auto cfg = small_study();
  cfg.sample_sizes = {50};
  cfg.replications = 2;
  cfg.scenarios = {parse_scenario("ii")};
  const auto recs = run_study(cfg);
  const auto table = csv::parse(records_csv(recs));
  CHECK(table.header.size() == 19);
  CHECK(table.rows.size() == 2);
  CHECK(table.column("theta_acc").has_value());
  const double acc = csv::parse_number(table.rows[1][*table.column("theta_acc")]).value();
  CHECK(acc == recs[1].bundle.theta_acc);
}

TEST_CASE("audit_bundle detects violations") {
  CHECK(audit_bundle(combine(209, 212, 215, 10), 210));
  EstimateBundle bad = combine(209, 212, 215, 10);
  bad.theta_acc = 213;
  CHECK_FALSE(audit_bundle(bad, 210));
  bad = combine(209, 212, 215, 10);
  bad.lambda_hat = 0.3;
  CHECK_FALSE(audit_bundle(bad, 210));
}

TEST_CASE("flagged records are excluded from metrics and counted") {
  auto cfg = small_study();
  cfg.sample_sizes = {100};
  cfg.scenarios = {parse_scenario("cc")};
  auto recs = run_study(cfg);
  recs[2].flagged = true;
  recs[2].error = "DegenerateSample";
  const auto table = compute_metrics(recs, 210);
  REQUIRE(table.size() == 4);
  CHECK(table[0].count == 5);
  CHECK(table[0].excluded == 1);
  for (auto& r : recs) r.flagged = true;
  CHECK(code_of([&] { compute_metrics(recs, 210); }) == ErrorCode::NoData);
}

TEST_CASE("report rendering") {
  auto cfg = small_study();
  cfg.sample_sizes = {100};
  cfg.scenarios = {parse_scenario("ci")};
  const auto table = compute_metrics(run_study(cfg), 210);
  REQUIRE(table.size() == 4);

  const std::string csv_text = render_report(table, ReportFormat::Csv);
  const auto parsed = csv::parse(csv_text);
  CHECK(parsed.rows.size() == 4);
  CHECK(parsed.rows[3][*parsed.column("estimator")] == "DR+ACC");
  CHECK(csv::parse_number(parsed.rows[0][*parsed.column("rmse")]).value() == table[0].rmse);

  const std::string md = render_report(table, ReportFormat::Markdown);
  CHECK(md.find("### n = 100") != std::string::npos);
  CHECK(count_of(md, "| Correct mu, Incorrect pi |") == 1);
  CHECK(std::regex_search(md, std::regex(R"(\|  \| DR\+ACC \|)")));
  CHECK(render_report(table, ReportFormat::Markdown) == md);

  TempDir dir;
  emit_report(table, ReportFormat::Csv, dir / "m.csv");
  CHECK(dracc::test::read_file(dir / "m.csv") == csv_text);
  CHECK(code_of([&] { emit_report(table, ReportFormat::Csv, dir / "missing-dir" / "m.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("histograms") {
  std::vector<double> values(1000);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(double(i)) * 10 + 210;
  const double ref = 210;
  const auto h = plot::make_histogram(values, 30, &ref);
  CHECK(h.counts.size() == 30);
  CHECK(h.total() == 1000);
  const std::string svg = plot::histogram_svg(h, 210, "t");
  CHECK(count_of(svg, "<rect") == 30);
  CHECK(svg.find("<line") != std::string::npos);

  const std::vector<double> same(50, 3.25);
  const auto flat = plot::make_histogram(same, 10);
  std::size_t occupied = 0;
  for (auto c : flat.counts) occupied += c > 0;
  CHECK(occupied == 1);
  CHECK(flat.total() == 50);

  const auto csv_table = csv::parse(plot::histogram_csv(h));
  CHECK(csv_table.rows.size() == 30);

  TempDir dir;
  plot::emit_histogram_svg(values, 30, 210, dir / "h.svg", dir / "h.csv", "x");
  CHECK(count_of(dracc::test::read_file(dir / "h.svg"), "<rect") == 30);
  CHECK(code_of([&] { plot::emit_histogram_svg(std::vector<double>{1.0}, 5, 0, dir / "a.svg", dir / "a.csv"); }) ==
        ErrorCode::NoData);
  CHECK(code_of([&] { plot::emit_histogram_svg(values, 5, 0, dir / "no" / "a.svg", dir / "no" / "a.csv"); }) ==
        ErrorCode::IoError);
}

TEST_CASE("histogram counts are conserved on random data") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial * 7);
    for (auto& x : v) x = g(rng) * std::exp(g(rng));
    const auto h = plot::make_histogram(v, 1 + trial % 40);
    CHECK(h.total() == v.size());
  }
}

TEST_CASE("limit law sample and overlay") {
  auto cfg = small_study();
  const auto law = limit_law_sample(cfg, 200, Scenario{}, 0);
  CHECK(law.draws.size() == cfg.bootstrap_b);
  CHECK(law.gaussian_sd > 0);
  const std::string svg = plot::density_overlay_svg(law.draws, 40, law.gaussian_sd, "W");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
}
