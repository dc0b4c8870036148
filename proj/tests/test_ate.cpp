#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dracc/ate_analysis.hpp"
#include "dracc/csv.hpp"
#include "dracc/error.hpp"
#include "test_util.hpp"

using namespace dracc;
using doctest::Approx;
using dracc::test::TempDir;

namespace {

// 200 units per arm assigned by shuffling, two noise covariates, and outcome k
// shifted by effects[k] in the treated arm.
std::string synthetic_csv(const std::vector<double>& effects, std::uint64_t seed, bool constant_last = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<int> a(400, 0);
  std::fill(a.begin(), a.begin() + 200, 1);
  std::shuffle(a.begin(), a.end(), rng);
  std::ostringstream out;
  out << "age,sex,A";
  for (std::size_t k = 0; k < effects.size(); ++k) out << ",p" << k;
  if (constant_last) out << ",flat";
  out << '\n';
  for (int i = 0; i < 400; ++i) {
    out << csv::format_number(50 + 10 * g(rng)) << ',' << (g(rng) > 0 ? 1 : 0) << ',' << a[i];
    for (double e : effects) out << ',' << csv::format_number(e * a[i] + g(rng));
    if (constant_last) out << ",3.5";
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

const AteSchema kSchema{{"age", "sex"}, "A"};

double ate_field(const AteEstimate& est, int e) {
  switch (e) {
    case 0: return est.ate_or;
    case 1: return est.ate_ipw;
    case 2: return est.ate_dr;
    default: return est.ate_acc;
  }
}

}  // namespace

TEST_CASE("analyze recovers a known effect and flags it") {
  TempDir dir;
  dracc::test::write_file(dir / "d.csv", synthetic_csv({5.0, 0.0}, 1));
  const auto report = analyze_ate(dir / "d.csv", kSchema, names(2), AteConfig{});
  CHECK(report.n == 400);
  CHECK(report.n_treated == 200);
  REQUIRE(report.outcomes.size() == 2);
  const auto& hit = report.outcomes[0];
  REQUIRE(hit.ok);
  CHECK(std::abs(hit.estimate.ate_acc - 5.0) <= 0.3);
  CHECK(hit.significant[3]);
  for (int e = 0; e < 4; ++e) CHECK(hit.intervals[e].contains(ate_field(hit.estimate, e)));
  CHECK(report.outcomes[1].ok);
  CHECK(report.significant_counts[3] >= 1);
}

TEST_CASE("constant outcome gives zero effects and no significance") {
  TempDir dir;
  dracc::test::write_file(dir / "d.csv", synthetic_csv({}, 2, true));
  const auto report = analyze_ate(dir / "d.csv", kSchema, {"flat"}, AteConfig{});
  const auto& r = report.outcomes.at(0);
  REQUIRE(r.ok);
  CHECK(std::abs(r.estimate.ate_or) <= 1e-10);
  CHECK(std::abs(r.estimate.ate_ipw) <= 1e-10);
  CHECK(std::abs(r.estimate.ate_dr) <= 1e-10);
  CHECK(std::abs(r.estimate.ate_acc) <= 1e-10);
  for (bool s : r.significant) CHECK_FALSE(s);
  for (auto c : report.significant_counts) CHECK(c == 0);
}

TEST_CASE("significance count is monotone in alpha") {
  std::vector<double> effects;
  for (int k = 0; k < 30; ++k) effects.push_back(0.02 * k);
  TempDir dir;
  dracc::test::write_file(dir / "d.csv", synthetic_csv(effects, 3));
  const auto data = load_ate_csv(dir / "d.csv", kSchema, names(effects.size()));
  std::array<std::size_t, 4> previous{};
  previous.fill(effects.size());
  for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
    AteConfig cfg;
    cfg.alpha = alpha;
    cfg.bootstrap_b = 2000;
    const auto report = analyze_ate(data, cfg);
    for (int e = 0; e < 4; ++e) {
      INFO("alpha " << alpha << " estimator " << e);
      CHECK(report.significant_counts[e] <= previous[e]);
      previous[e] = report.significant_counts[e];
    }
  }
}

TEST_CASE("swapping treatment labels negates every effect") {
  TempDir dir;
  const std::string text = synthetic_csv({1.0, -0.5, 0.1}, 4);
  dracc::test::write_file(dir / "d.csv", text);
  auto table = csv::parse(text);
  std::ostringstream flipped;
  flipped << "age,sex,A,p0,p1,p2\n";
  for (auto& row : table.rows) {
    row[2] = row[2] == "1" ? "0" : "1";
    for (std::size_t j = 0; j < row.size(); ++j) flipped << (j ? "," : "") << row[j];
    flipped << '\n';
  }
  dracc::test::write_file(dir / "f.csv", flipped.str());
  for (auto clipping : {AteClipping::PerArm, AteClipping::Difference}) {
    AteConfig cfg;
    cfg.clipping = clipping;
    const auto a = analyze_ate(dir / "d.csv", kSchema, names(3), cfg);
    const auto b = analyze_ate(dir / "f.csv", kSchema, names(3), cfg);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& x = a.outcomes[k].estimate;
      const auto& y = b.outcomes[k].estimate;
      CHECK(y.ate_or == Approx(-x.ate_or).epsilon(1e-8));
      CHECK(y.ate_ipw == Approx(-x.ate_ipw).epsilon(1e-8));
      CHECK(y.ate_dr == Approx(-x.ate_dr).epsilon(1e-8));
      CHECK(y.ate_acc == Approx(-x.ate_acc).epsilon(1e-8));
    }
  }
}

TEST_CASE("ATE interval modes and outputs") {
  TempDir dir;
  dracc::test::write_file(dir / "d.csv", synthetic_csv({2.0, 0.3}, 5));
  AteConfig sum_cfg;
  AteConfig per_cfg;
  per_cfg.ci_mode = AteCiMode::PerArmReport;
  const auto sum = analyze_ate(dir / "d.csv", kSchema, names(2), sum_cfg);
  const auto per = analyze_ate(dir / "d.csv", kSchema, names(2), per_cfg);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& s = sum.outcomes[k];
    const auto& p = per.outcomes[k];
    CHECK(p.intervals[3].lo == Approx(p.acc_arm1.lo - p.acc_arm0.hi));
    CHECK(p.intervals[3].hi == Approx(p.acc_arm1.hi - p.acc_arm0.lo));
    CHECK(p.intervals[3].width() >= s.intervals[3].width());
    CHECK(s.intervals[3].contains(s.estimate.ate_acc));
    // the outcome model is difference in means, so its influence column vanishes
    CHECK(s.intervals[0].width() == 0.0);
  }

  const auto results = csv::parse(ate_results_csv(sum));
  CHECK(results.rows.size() == 2);
  CHECK(results.column("ate_acc").has_value());
  const std::string md = ate_summary_markdown(sum);
  CHECK(md.find("DR+ACC") != std::string::npos);

  CHECK(parse_ate_ci_mode("per-arm-report") == AteCiMode::PerArmReport);
  CHECK(parse_ate_clipping("difference") == AteClipping::Difference);
  CHECK_THROWS_AS(parse_ate_ci_mode("both"), Error);
  CHECK_THROWS_AS(parse_ate_clipping("none"), Error);
}

TEST_CASE("per-outcome errors are recorded and the analysis continues") {
  TempDir dir;
  dracc::test::write_file(dir / "d.csv", synthetic_csv({1.0}, 6));
  auto data = load_ate_csv(dir / "d.csv", kSchema, names(1));
  // an outcome whose treatment vector is not the study's
  auto other_a = std::make_shared<Indicator>(data[0].treatment());
  const auto treated = std::find(other_a->begin(), other_a->end(), 1);
  const auto control = std::find(other_a->begin(), other_a->end(), 0);
  std::iter_swap(treated, control);
  data.emplace_back(data[0].shared_covariates(), other_a, data[0].outcome(), "stray");
  const auto report = analyze_ate(data, AteConfig{});
  REQUIRE(report.outcomes.size() == 2);
  CHECK(report.outcomes[0].ok);
  CHECK_FALSE(report.outcomes[1].ok);
  CHECK(report.outcomes[1].error.find("DimensionMismatch") == 0);
}

TEST_CASE("analyze config validation") {
  TempDir dir;
  dracc::test::write_file(dir / "d.csv", synthetic_csv({1.0}, 7));
  const auto data = load_ate_csv(dir / "d.csv", kSchema, names(1));
  AteConfig bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(analyze_ate(data, bad), Error);
  bad = AteConfig{};
  bad.bootstrap_b = 10;
  CHECK_THROWS_AS(analyze_ate(data, bad), Error);
  bad = AteConfig{};
  bad.eps = 0.7;
  CHECK_THROWS_AS(analyze_ate(data, bad), Error);
}
