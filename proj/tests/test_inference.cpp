#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dracc/error.hpp"
#include "dracc/estimators.hpp"
#include "dracc/inference.hpp"
#include "oracles/oracles.hpp"

using namespace dracc;
using doctest::Approx;

namespace {

CovMatrix3 cov(const Eigen::Matrix3d& m) {
  CovMatrix3 c;
  c.sigma = m;
  return c;
}

Eigen::Matrix3d random_psd(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
  return a * a.transpose();
}

oracle::Cov3 to_array(const Eigen::Matrix3d& m) {
  oracle::Cov3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = m(i, j);
  return out;
}

}  // namespace

TEST_CASE("normal_quantile matches the bisection oracle") {
  for (double p : {1e-10, 1e-6, 0.001, 0.01, 0.025, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.975, 0.99, 0.999, 1 - 1e-6}) {
    CHECK(std::abs(normal_quantile(p) - oracle::normal_quantile(p)) <= 1e-8 * (1 + std::abs(oracle::normal_quantile(p))));
  }
  CHECK(normal_quantile(0.975) == Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.5) == 0.0);
}

TEST_CASE("influence matrix examples") {
  const Vector mu = (Vector(2) << 2, 4).finished();
  const Vector pi = Vector::Constant(2, 0.5);
  const Indicator r{1, 0};
  const std::vector<double> yv{2, 0};
  const auto y = MaskedOutcome::masked_by(yv, r);
  const auto b = compute_bundle(mu, pi, r, y);
  const auto infl = influence_matrix(mu, pi, r, y, b);
  Eigen::Matrix<double, 2, 3> expected;
  expected << -1, 2, 2, 1, -2, -2;
  CHECK(infl.values == expected);
  CHECK(infl.dr_column() == (Vector(2) << -1, 1).finished());

  const auto sigma = covariance(infl);
  Eigen::Matrix3d s;
  s << 1, -2, -2, -2, 4, 4, -2, 4, 4;
  CHECK(sigma.sigma == s);

  const std::vector<double> cv{3, 3, 3};
  const Vector c = Vector::Constant(3, 3.0);
  const auto yc = MaskedOutcome::observed(cv);
  const Indicator all{1, 1, 1};
  const auto bc = compute_bundle(c, Vector::Ones(3), all, yc);
  const auto zero = influence_matrix(c, Vector::Ones(3), all, yc, bc);
  CHECK(zero.values.isZero(0.0));
  CHECK(covariance(zero).sigma.isZero(0.0));
}

TEST_CASE("influence columns sum to zero and the covariance is symmetric PSD") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 5 + trial % 50;
    Vector mu(n), pi(n);
    Indicator r(static_cast<std::size_t>(n));
    std::vector<double> yv(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = 100 + 10 * g(rng);
      pi(i) = u(rng);
      r[static_cast<std::size_t>(i)] = u(rng) < 0.5;
      yv[static_cast<std::size_t>(i)] = 100 + 10 * g(rng);
    }
    const auto y = MaskedOutcome::masked_by(yv, r);
    const auto b = compute_bundle(mu, pi, r, y);
    const auto infl = influence_matrix(mu, pi, r, y, b);
    const double scale = infl.values.cwiseAbs().maxCoeff() + 1.0;
    for (int j = 0; j < 3; ++j) REQUIRE(std::abs(infl.values.col(j).sum()) <= 1e-10 * scale * double(n));
    const auto s = covariance(infl).sigma;
    REQUIRE(s == s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(s);
    REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10 * s.trace());
    REQUIRE(std::abs(influence_variance(infl.dr_column()) -
                     (Eigen::RowVector3d(1, 1, -1) * s * Eigen::Vector3d(1, 1, -1)).value()) <= 1e-8 * s.trace());
  }
}

TEST_CASE("covariance factor") {
  Eigen::Matrix3d d = Eigen::Vector3d(4, 1, 0.25).asDiagonal();
  const Eigen::Matrix3d l = covariance_factor(cov(d));
  CHECK(l.isApprox(Eigen::Matrix3d(Eigen::Vector3d(2, 1, 0.5).asDiagonal())));
  CHECK(covariance_factor(cov(Eigen::Matrix3d::Zero())).isZero(0.0));

  // rank-one PSD needs the jitter retry
  Eigen::Matrix3d rank1;
  rank1 << 1, -2, -2, -2, 4, 4, -2, 4, 4;
  const Eigen::Matrix3d lr = covariance_factor(cov(rank1));
  CHECK((lr * lr.transpose() - rank1).cwiseAbs().maxCoeff() < 1e-8);

  Eigen::Matrix3d indefinite = Eigen::Vector3d(1, -1, 1).asDiagonal();
  try {
    covariance_factor(cov(indefinite));
    FAIL("expected FactorizationFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FactorizationFailure);
  }
}

TEST_CASE("sample_W basic contracts") {
  Rng rng = make_rng(1);
  const auto zero = sample_W(cov(Eigen::Matrix3d::Zero()), 1000, rng);
  CHECK(std::all_of(zero.begin(), zero.end(), [](double w) { return w == 0.0; }));

  const Eigen::Matrix3d d = Eigen::Vector3d(4, 1, 0.25).asDiagonal();
  Rng a = make_rng(5), b = make_rng(5);
  CHECK(sample_W(cov(d), 2000, a) == sample_W(cov(d), 2000, b));
  CHECK_THROWS_AS(sample_W(cov(d), 999, a), Error);
}

TEST_CASE("sample_W quantiles agree with the brute-force limit-law oracle at B = 1e6") {
  std::mt19937_64 seeder(404);
  const Eigen::Matrix3d diag = Eigen::Vector3d(4, 1, 0.25).asDiagonal();
  for (const Eigen::Matrix3d& s : {diag, random_psd(seeder)}) {
    Rng rng = make_rng(2718);
    std::vector<double> w = sample_W(cov(s), 1000000, rng);
    std::sort(w.begin(), w.end());
    const auto ref = oracle::limit_law(to_array(s), 1000000, 31337);
    const double tol = 0.02 * std::sqrt(s.diagonal().maxCoeff());
    for (double p : {0.01, 0.025, 0.5, 0.975, 0.99}) {
      INFO("p = " << p);
      CHECK(std::abs(sorted_quantile(w, p) - oracle::quantile7(ref, p)) <= tol);
    }
  }
}

TEST_CASE("W is symmetric about zero for independent equal-variance components") {
  Rng rng = make_rng(88);
  const auto w = sample_W(cov(Eigen::Matrix3d::Identity()), 1000000, rng);
  double m1 = 0, m2 = 0, m3 = 0;
  for (double v : w) m1 += v;
  m1 /= double(w.size());
  for (double v : w) {
    m2 += (v - m1) * (v - m1);
    m3 += (v - m1) * (v - m1) * (v - m1);
  }
  m2 /= double(w.size());
  m3 /= double(w.size());
  CHECK(std::abs(m3 / std::pow(m2, 1.5)) < 0.02);
  CHECK(std::abs(m1) < 0.01);
}

TEST_CASE("sorted_quantile follows type 7") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(sorted_quantile(v, 0.0) == 1);
  CHECK(sorted_quantile(v, 1.0) == 4);
  CHECK(sorted_quantile(v, 0.5) == 2.5);
  CHECK(sorted_quantile(v, 0.25) == Approx(1.75));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  std::vector<double> s(101);
  for (auto& x : s) x = g(rng);
  const auto unsorted = s;
  std::sort(s.begin(), s.end());
  for (double p = 0.0; p <= 1.0; p += 0.0125) CHECK(sorted_quantile(s, p) == Approx(oracle::quantile7(unsorted, p)));
  CHECK_THROWS_AS(sorted_quantile(std::vector<double>{}, 0.5), Error);
}

TEST_CASE("bootstrap interval formula") {
  std::vector<double> draws(1000, -2.0);
  std::fill(draws.begin() + 500, draws.end(), 2.0);
  std::shuffle(draws.begin(), draws.end(), std::mt19937_64(3));
  const auto ci = bootstrap_interval(210.0, 100, draws, 0.05);
  CHECK(ci.lo == Approx(209.8).epsilon(1e-14));
  CHECK(ci.hi == Approx(210.2).epsilon(1e-14));
  CHECK(ci.method == IntervalMethod::ParametricBootstrap);
  CHECK(ci.level == Approx(0.95));
}

TEST_CASE("acc_interval degenerate, monotone and containing the estimate") {
  EstimateBundle b = combine(210, 211, 210.5, 100);
  Rng rng = make_rng(4);
  const auto zero = acc_interval(b, cov(Eigen::Matrix3d::Zero()), 1000, 0.05, rng);
  CHECK(zero.lo == b.theta_acc);
  CHECK(zero.hi == b.theta_acc);

  std::mt19937_64 seeder(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d s = random_psd(seeder);
    Rng r1 = make_rng(trial), r2 = make_rng(trial);
    const auto narrow = acc_interval(b, cov(s), 4000, 0.2, r1);
    const auto wide = acc_interval(b, cov(s), 4000, 0.01, r2);
    CHECK(narrow.contains(b.theta_acc));
    CHECK(narrow.lo < b.theta_acc);
    CHECK(narrow.hi > b.theta_acc);
    CHECK(wide.lo <= narrow.lo);
    CHECK(wide.hi >= narrow.hi);

    // same draws, four times the sample size: width halves
    EstimateBundle big = b;
    big.n = 400;
    Rng r3 = make_rng(trial), r4 = make_rng(trial);
    const auto w100 = acc_interval(b, cov(s), 4000, 0.05, r3);
    const auto w400 = acc_interval(big, cov(s), 4000, 0.05, r4);
    CHECK(w400.width() == Approx(w100.width() / 2).epsilon(1e-12));
  }
}

TEST_CASE("wald interval") {
  const auto zero = wald_interval(5.0, Vector::Constant(10, 3.0), 0.05);
  CHECK(zero.lo == 5.0);
  CHECK(zero.hi == 5.0);

  const auto unit = wald_interval_from_variance(210.0, 1.0, 100, 0.05);
  CHECK(unit.hi - 210.0 == Approx(0.195996).epsilon(1e-5));
  CHECK(210.0 - unit.lo == Approx(0.195996).epsilon(1e-5));

  // +-1 column has 1/n variance exactly 1
  Vector phi(100);
  for (int i = 0; i < 100; ++i) phi(i) = i % 2 ? 1.0 : -1.0;
  CHECK(influence_variance(phi) == 1.0);
  const auto from_phi = wald_interval(210.0, phi, 0.05);
  CHECK(from_phi.lo == unit.lo);
  CHECK(from_phi.hi == unit.hi);

  const auto n1 = wald_interval_from_variance(0.0, 2.7, 250, 0.1);
  const auto n4 = wald_interval_from_variance(0.0, 2.7, 1000, 0.1);
  CHECK(n4.width() * 2 == n1.width());
  CHECK_THROWS_AS(wald_interval_from_variance(0.0, 1.0, 100, 1.0), Error);
}
